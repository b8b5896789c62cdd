#pragma once

// Shared fixtures for the unit and acceptance suites: synthetic frames and
// curves, a scratch directory, and brute-force oracles that are written
// independently of the library code they check.

#include "keysched/error.hpp"
#include "keysched/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace keysched::testing {

namespace fs = std::filesystem;

/// Error code thrown by `fn`, or nullopt when it returns normally.
template <typename Fn>
std::optional<ErrorCode> error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("keysched-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Smooth 2-D sinusoidal texture sampled at (col - dx, row - dy), so dx = 1
/// is the same scene moved one pixel right.
inline Frame sinusoid_texture(Index height, Index width, double dx = 0.0, double dy = 0.0, double wavelength = 16.0) {
  Frame f{Image(height, width)};
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) {
      const double x = static_cast<double>(c) - dx;
      const double y = static_cast<double>(r) - dy;
      f.pixels(r, c) = 0.5 + 0.2 * std::sin(2 * std::numbers::pi * x / wavelength) +
                       0.2 * std::sin(2 * std::numbers::pi * 1.1 * y / wavelength + 0.3);
    }
  return f;
}

/// Zeros with the given unit-height (or custom height) bumps.
inline MotionCurve bump_curve(Index n, const std::vector<std::pair<Index, double>>& bumps) {
  MotionCurve c{Eigen::VectorXd::Zero(n), CurveStage::Normalized};
  for (auto [i, h] : bumps) c.values(i) = h;
  return c;
}

inline MotionCurve random_normalized(std::mt19937_64& rng, Index n, bool quantize = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = quantize ? std::floor(u(rng) * 8.0) / 8.0 : u(rng);
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  if (hi > lo) v = ((v.array() - lo) / (hi - lo)).matrix();
  return {v, CurveStage::Normalized};
}

namespace oracle {

/// Prominence by definition: walk to the nearest strictly higher sample on
/// each side (or the end), take the lowest point on each walk, and subtract
/// the higher of the two from the peak height.
inline double prominence(const std::vector<double>& x, size_t p) {
  const double h = x[p];
  long left_stop = -1;
  for (long j = static_cast<long>(p) - 1; j >= 0; --j)
    if (x[static_cast<size_t>(j)] > h) { left_stop = j; break; }
  size_t right_stop = x.size();
  for (size_t j = p + 1; j < x.size(); ++j)
    if (x[j] > h) { right_stop = j; break; }
  const double left_min = *std::min_element(x.begin() + (left_stop + 1), x.begin() + static_cast<long>(p) + 1);
  const double right_min = *std::min_element(x.begin() + static_cast<long>(p), x.begin() + static_cast<long>(right_stop));
  return h - std::max(left_min, right_min);
}

/// Peaks via run-length compression: a run of equal samples that is
/// strictly higher than the runs on both sides reports its first index.
inline std::vector<size_t> plateau_maxima(const std::vector<double>& x) {
  struct Run { double value; size_t first; };
  std::vector<Run> runs;
  for (size_t i = 0; i < x.size(); ++i)
    if (runs.empty() || x[i] != runs.back().value) runs.push_back({x[i], i});
  std::vector<size_t> out;
  for (size_t r = 1; r + 1 < runs.size(); ++r)
    if (runs[r].value > runs[r - 1].value && runs[r].value > runs[r + 1].value) out.push_back(runs[r].first);
  return out;
}

/// Repeatedly take the tallest remaining candidate (lowest index on ties)
/// and discard everything closer than `distance`.
inline Indices peaks(const Eigen::VectorXd& values, Index distance, double min_prominence) {
  const std::vector<double> x(values.data(), values.data() + values.size());
  std::vector<size_t> pool;
  for (size_t p : plateau_maxima(x))
    if (prominence(x, p) >= min_prominence) pool.push_back(p);
  Indices kept;
  while (!pool.empty()) {
    size_t best = 0;
    for (size_t k = 1; k < pool.size(); ++k)
      if (x[pool[k]] > x[pool[best]] || (x[pool[k]] == x[pool[best]] && pool[k] < pool[best])) best = k;
    const auto chosen = static_cast<Index>(pool[best]);
    kept.push_back(chosen);
    std::erase_if(pool, [&](size_t q) { return std::abs(static_cast<Index>(q) - chosen) < distance; });
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

/// Exhaustive maximum matching: every gt point either stays unmatched or
/// takes any unused allowed prediction.
inline Index brute_force_matching(const Indices& gt, const Indices& pred, double t, bool strict = false) {
  std::vector<bool> used(pred.size(), false);
  std::function<Index(size_t)> best = [&](size_t g) -> Index {
    if (g == gt.size()) return 0;
    Index result = best(g + 1);
    for (size_t p = 0; p < pred.size(); ++p) {
      const auto d = static_cast<double>(std::abs(gt[g] - pred[p]));
      if (used[p] || (strict ? !(d < t) : !(d <= t))) continue;
      used[p] = true;
      result = std::max(result, 1 + best(g + 1));
      used[p] = false;
    }
    return result;
  };
  return best(0);
}

/// Mel band whose center lies closest to `hz`, using the Slaney formula
/// written out directly (128 bands, 0..8 kHz).
inline Index nearest_mel_band(double hz) {
  auto to_mel = [](double f) { return f < 1000.0 ? 3.0 * f / 200.0 : 15.0 + 27.0 * std::log(f / 1000.0) / std::log(6.4); };
  auto to_hz = [](double m) { return m < 15.0 ? 200.0 * m / 3.0 : 1000.0 * std::pow(6.4, (m - 15.0) / 27.0); };
  const double top = to_mel(8000.0);
  Index best = 0;
  double best_dist = 1e300;
  for (Index b = 0; b < 128; ++b) {
    const double center = to_hz(top * static_cast<double>(b + 1) / 129.0);
    if (std::abs(center - hz) < best_dist) {
      best_dist = std::abs(center - hz);
      best = b;
    }
  }
  return best;
}

}  // namespace oracle

}  // namespace keysched::testing
