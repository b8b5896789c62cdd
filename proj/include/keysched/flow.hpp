#pragma once

#include "keysched/types.hpp"

#include <vector>

namespace keysched::flow {

/// Dense displacement field in pixels/frame; u is horizontal, v vertical.
struct FlowField {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;

  Index height() const { return u.rows(); }
  Index width() const { return u.cols(); }

  static FlowField zeros(Index height, Index width) {
    return {Eigen::MatrixXd::Zero(height, width), Eigen::MatrixXd::Zero(height, width)};
  }
};

/// Pyramidal Horn-Schunck settings. `alpha` is expressed on the 8-bit
/// intensity scale; frames in [0,1] are rescaled internally.
struct FlowParams {
  double alpha = 15.0;
  int iterations = 100;
  int pyramid_levels = 3;
  double convergence_eps = 1e-4;
};

inline constexpr Index kMinPyramidSide = 8;

/// Coarse-to-fine Horn-Schunck flow from `a` to `b`: b(x + u, y + v) ~ a(x, y).
/// Pyramid depth is reduced when a level would drop below 8 pixels per side.
FlowField estimate_flow(const Frame& a, const Frame& b, const FlowParams& params = {});

/// Sum of |u| + |v| over all pixels; divided by the pixel count when `normalize`.
double motion_score(const FlowField& flow, bool normalize = true);

/// Motion score of every consecutive pair. The last entry repeats the
/// previous one so the curve has one value per frame. `threads` <= 0 means
/// hardware concurrency.
MotionCurve motion_curve(const FrameSequence& seq, const FlowParams& params = {}, bool normalize = true,
                         int threads = 1);

namespace detail {

/// Linearized brightness-constancy problem at one pyramid level around a
/// base flow: residual = ix * u + iy * v + it.
struct LinearizedProblem {
  Eigen::MatrixXd ix, iy, it;
};

LinearizedProblem linearize(const Image& a, const Image& b, const FlowField& base);

/// Sum of squared data residuals plus alpha^2 times squared 4-neighbour
/// differences of u and v.
double horn_schunck_energy(const LinearizedProblem& p, const FlowField& flow, double alpha);

/// One pixel-wise block-Jacobi sweep. Returns the largest absolute update.
double jacobi_sweep(const LinearizedProblem& p, FlowField& flow, double alpha);

Image downsample(const Image& img);
Image warp_bilinear(const Image& img, const FlowField& flow);
FlowField upsample_flow(const FlowField& flow, Index height, Index width);

}  // namespace detail

}  // namespace keysched::flow
