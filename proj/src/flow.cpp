#include "keysched/flow.hpp"

#include "keysched/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace keysched::flow {

namespace {

// Frames arrive in [0,1]; alpha is tuned for 0..255 intensities.
constexpr double kIntensityScale = 255.0;

Eigen::MatrixXd gradient_x(const Image& img) {
  const Index w = img.cols();
  Eigen::MatrixXd g(img.rows(), w);
  for (Index c = 0; c < w; ++c) {
    const Index l = std::max<Index>(c - 1, 0);
    const Index r = std::min<Index>(c + 1, w - 1);
    g.col(c) = 0.5 * (img.col(r) - img.col(l));
  }
  return g;
}

Eigen::MatrixXd gradient_y(const Image& img) {
  const Index h = img.rows();
  Eigen::MatrixXd g(h, img.cols());
  for (Index r = 0; r < h; ++r) {
    const Index up = std::max<Index>(r - 1, 0);
    const Index dn = std::min<Index>(r + 1, h - 1);
    g.row(r) = 0.5 * (img.row(dn) - img.row(up));
  }
  return g;
}

double sample_bilinear(const Image& img, double y, double x) {
  const Index h = img.rows();
  const Index w = img.cols();
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  const auto y0 = static_cast<Index>(std::floor(y));
  const auto x0 = static_cast<Index>(std::floor(x));
  const Index y1 = std::min(y0 + 1, h - 1);
  const Index x1 = std::min(x0 + 1, w - 1);
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);
  return (1 - fy) * ((1 - fx) * img(y0, x0) + fx * img(y0, x1)) + fy * ((1 - fx) * img(y1, x0) + fx * img(y1, x1));
}

int effective_levels(Index height, Index width, int requested) {
  int levels = 1;
  Index h = height;
  Index w = width;
  while (levels < requested && h / 2 >= kMinPyramidSide && w / 2 >= kMinPyramidSide) {
    h /= 2;
    w /= 2;
    ++levels;
  }
  return levels;
}

void check_params(const FlowParams& p) {
  if (!(p.alpha > 0) || p.iterations < 1 || p.pyramid_levels < 1 || !(p.convergence_eps >= 0))
    throw Error(ErrorCode::InvalidArgument, "flow parameters out of range");
}

}  // namespace

namespace detail {

Image downsample(const Image& img) {
  const Index h = img.rows() / 2;
  const Index w = img.cols() / 2;
  Image out(h, w);
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c)
      out(r, c) = 0.25 * img.block(2 * r, 2 * c, 2, 2).sum();
  return out;
}

Image warp_bilinear(const Image& img, const FlowField& flow) {
  Image out(img.rows(), img.cols());
  for (Index r = 0; r < img.rows(); ++r)
    for (Index c = 0; c < img.cols(); ++c)
      out(r, c) = sample_bilinear(img, static_cast<double>(r) + flow.v(r, c), static_cast<double>(c) + flow.u(r, c));
  return out;
}

FlowField upsample_flow(const FlowField& flow, Index height, Index width) {
  const double sy = static_cast<double>(height) / static_cast<double>(flow.height());
  const double sx = static_cast<double>(width) / static_cast<double>(flow.width());
  FlowField out = FlowField::zeros(height, width);
  for (Index r = 0; r < height; ++r) {
    const double y = (static_cast<double>(r) + 0.5) / sy - 0.5;
    for (Index c = 0; c < width; ++c) {
      const double x = (static_cast<double>(c) + 0.5) / sx - 0.5;
      out.u(r, c) = sx * sample_bilinear(flow.u, y, x);
      out.v(r, c) = sy * sample_bilinear(flow.v, y, x);
    }
  }
  return out;
}

LinearizedProblem linearize(const Image& a, const Image& b, const FlowField& base) {
  const Image warped = warp_bilinear(b, base);
  LinearizedProblem p;
  p.ix = 0.5 * (gradient_x(a) + gradient_x(warped));
  p.iy = 0.5 * (gradient_y(a) + gradient_y(warped));
  p.it = (warped - a) - p.ix.cwiseProduct(base.u) - p.iy.cwiseProduct(base.v);
  return p;
}

double horn_schunck_energy(const LinearizedProblem& p, const FlowField& f, double alpha) {
  const double data = (p.ix.cwiseProduct(f.u) + p.iy.cwiseProduct(f.v) + p.it).squaredNorm();
  const Index h = f.height();
  const Index w = f.width();
  double smooth = 0.0;
  if (w > 1) {
    smooth += (f.u.rightCols(w - 1) - f.u.leftCols(w - 1)).squaredNorm();
    smooth += (f.v.rightCols(w - 1) - f.v.leftCols(w - 1)).squaredNorm();
  }
  if (h > 1) {
    smooth += (f.u.bottomRows(h - 1) - f.u.topRows(h - 1)).squaredNorm();
    smooth += (f.v.bottomRows(h - 1) - f.v.topRows(h - 1)).squaredNorm();
  }
  return data + alpha * alpha * smooth;
}

double jacobi_sweep(const LinearizedProblem& p, FlowField& flow, double alpha) {
  const Index h = flow.height();
  const Index w = flow.width();
  const double a2 = alpha * alpha;
  FlowField next = FlowField::zeros(h, w);
  double max_delta = 0.0;
  for (Index c = 0; c < w; ++c) {
    for (Index r = 0; r < h; ++r) {
      double su = 0.0, sv = 0.0;
      int n = 0;
      auto add = [&](Index rr, Index cc) {
        su += flow.u(rr, cc);
        sv += flow.v(rr, cc);
        ++n;
      };
      if (r > 0) add(r - 1, c);
      if (r + 1 < h) add(r + 1, c);
      if (c > 0) add(r, c - 1);
      if (c + 1 < w) add(r, c + 1);
      if (n == 0) {
        next.u(r, c) = flow.u(r, c);
        next.v(r, c) = flow.v(r, c);
        continue;
      }
      const double ubar = su / n;
      const double vbar = sv / n;
      const double gx = p.ix(r, c);
      const double gy = p.iy(r, c);
      const double step = (gx * ubar + gy * vbar + p.it(r, c)) / (a2 * n + gx * gx + gy * gy);
      next.u(r, c) = ubar - gx * step;
      next.v(r, c) = vbar - gy * step;
      max_delta = std::max({max_delta, std::abs(next.u(r, c) - flow.u(r, c)), std::abs(next.v(r, c) - flow.v(r, c))});
    }
  }
  flow = std::move(next);
  return max_delta;
}

}  // namespace detail

FlowField estimate_flow(const Frame& a, const Frame& b, const FlowParams& params) {
  check_params(params);
  if (a.height() != b.height() || a.width() != b.width())
    throw Error(ErrorCode::DimensionMismatch, "frames differ in size");
  if (a.height() < kMinPyramidSide || a.width() < kMinPyramidSide)
    throw Error(ErrorCode::TooSmall, "frames must be at least 8x8");

  const int levels = effective_levels(a.height(), a.width(), params.pyramid_levels);
  std::vector<Image> pyr_a{a.pixels * kIntensityScale};
  std::vector<Image> pyr_b{b.pixels * kIntensityScale};
  for (int l = 1; l < levels; ++l) {
    pyr_a.push_back(detail::downsample(pyr_a.back()));
    pyr_b.push_back(detail::downsample(pyr_b.back()));
  }

  FlowField flow = FlowField::zeros(pyr_a.back().rows(), pyr_a.back().cols());
  for (int l = levels - 1; l >= 0; --l) {
    const Image& la = pyr_a[static_cast<size_t>(l)];
    const Image& lb = pyr_b[static_cast<size_t>(l)];
    if (flow.height() != la.rows() || flow.width() != la.cols()) flow = detail::upsample_flow(flow, la.rows(), la.cols());
    const auto problem = detail::linearize(la, lb, flow);
    for (int it = 0; it < params.iterations; ++it)
      if (detail::jacobi_sweep(problem, flow, params.alpha) < params.convergence_eps) break;
  }
  return flow;
}

double motion_score(const FlowField& flow, bool normalize) {
  const double total = flow.u.cwiseAbs().sum() + flow.v.cwiseAbs().sum();
  if (!normalize) return total;
  const auto pixels = static_cast<double>(flow.u.size());
  return pixels > 0 ? total / pixels : 0.0;
}

MotionCurve motion_curve(const FrameSequence& seq, const FlowParams& params, bool normalize, int threads) {
  const Index frames = seq.size();
  if (frames < 2) throw Error(ErrorCode::TooShort, "need at least 2 frames, got " + std::to_string(frames));
  check_params(params);

  MotionCurve curve;
  curve.values = Eigen::VectorXd::Zero(frames);
  const Index pairs = frames - 1;

  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto workers = static_cast<Index>(std::min<Index>(threads, pairs));

  // Each pair writes only its own slot; flow buffers are per call.
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&]() {
    for (Index t = next++; t < pairs && !failed; t = next++) {
      try {
        curve.values(t) = motion_score(estimate_flow(seq.frames[static_cast<size_t>(t)],
                                                     seq.frames[static_cast<size_t>(t + 1)], params),
                                       normalize);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (Index i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  curve.values(frames - 1) = curve.values(frames - 2);
  return curve;
}

}  // namespace keysched::flow
