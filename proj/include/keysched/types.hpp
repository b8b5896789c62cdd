#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace keysched {

using Index = Eigen::Index;
using Indices = std::vector<Index>;

/// Dense real matrix used for token embeddings, per-step features and
/// attention operands. Rows index tokens or time steps, columns channels.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using FeatureMatrix = Matrix<double>;

/// Grayscale image, luminance in [0,1], indexed (row, col).
using Image = Eigen::MatrixXd;

struct Frame {
  Image pixels;

  Index height() const { return pixels.rows(); }
  Index width() const { return pixels.cols(); }
};

struct FrameSequence {
  std::vector<Frame> frames;
  double fps = 24.0;

  Index size() const { return static_cast<Index>(frames.size()); }
  Index height() const { return frames.empty() ? 0 : frames.front().height(); }
  Index width() const { return frames.empty() ? 0 : frames.front().width(); }
};

struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = 16000;
};

enum class CurveStage { Raw, Smoothed, Normalized };

/// One score per frame. Normalized curves hold values in [0,1].
struct MotionCurve {
  Eigen::VectorXd values;
  CurveStage stage = CurveStage::Raw;

  Index size() const { return values.size(); }
};

struct Extrema {
  Indices peaks;
  Indices valleys;
};

/// Selected keyframes plus where each came from. `keyframes` is the sorted
/// union of {0}, peaks, valleys and fill.
struct KeyframeSchedule {
  Index total_frames = 0;
  Indices keyframes;
  Indices peaks;
  Indices valleys;
  Indices fill;

  bool operator==(const KeyframeSchedule&) const = default;
};

}  // namespace keysched
