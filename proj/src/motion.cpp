#include "keysched/motion.hpp"

#include "keysched/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace keysched::motion {

namespace {

void require_normalized(const MotionCurve& curve) {
  if (curve.stage != CurveStage::Normalized)
    throw Error(ErrorCode::NotNormalized, "peak detection needs a normalized curve");
  if (curve.size() > 0 && (curve.values.minCoeff() < 0.0 || curve.values.maxCoeff() > 1.0))
    throw Error(ErrorCode::NotNormalized, "normalized curve has values outside [0,1]");
}

}  // namespace

MotionCurve smooth(const MotionCurve& curve, Index window) {
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorCode::InvalidWindow, "window must be odd and >= 1, got " + std::to_string(window));
  const Index n = curve.size();
  MotionCurve out{Eigen::VectorXd(n), CurveStage::Smoothed};
  for (Index i = 0; i < n; ++i) {
    const Index k = std::min({window / 2, i, n - 1 - i});
    out.values(i) = curve.values.segment(i - k, 2 * k + 1).mean();
  }
  return out;
}

MotionCurve normalize(const MotionCurve& curve) {
  MotionCurve out{Eigen::VectorXd::Zero(curve.size()), CurveStage::Normalized};
  if (curve.size() == 0) return out;
  const double lo = curve.values.minCoeff();
  const double hi = curve.values.maxCoeff();
  if (hi > lo) out.values = ((curve.values.array() - lo) / (hi - lo)).cwiseMax(0.0).cwiseMin(1.0).matrix();
  return out;
}

Indices local_maxima(const Eigen::Ref<const Eigen::VectorXd>& x) {
  Indices peaks;
  const Index n = x.size();
  Index i = 1;
  while (i < n - 1) {
    if (x(i - 1) < x(i)) {
      Index ahead = i + 1;
      while (ahead < n - 1 && x(ahead) == x(i)) ++ahead;
      if (x(ahead) < x(i)) {
        peaks.push_back(i);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

Eigen::VectorXd peak_prominences(const Eigen::Ref<const Eigen::VectorXd>& x, const Indices& peaks) {
  const Index n = x.size();
  Eigen::VectorXd out(static_cast<Index>(peaks.size()));
  for (size_t k = 0; k < peaks.size(); ++k) {
    const Index p = peaks[k];
    if (p < 0 || p >= n) throw Error(ErrorCode::IndexOutOfRange, "peak index out of range");
    const double h = x(p);
    double left_min = h;
    for (Index i = p; i >= 0 && x(i) <= h; --i) left_min = std::min(left_min, x(i));
    double right_min = h;
    for (Index i = p; i < n && x(i) <= h; ++i) right_min = std::min(right_min, x(i));
    out(static_cast<Index>(k)) = h - std::max(left_min, right_min);
  }
  return out;
}

Indices detect_peaks(const MotionCurve& curve, Index min_distance, double min_prominence) {
  require_normalized(curve);
  const auto& x = curve.values;

  Indices candidates;
  {
    const Indices maxima = local_maxima(x);
    const Eigen::VectorXd prom = peak_prominences(x, maxima);
    for (size_t k = 0; k < maxima.size(); ++k)
      if (prom(static_cast<Index>(k)) >= min_prominence) candidates.push_back(maxima[k]);
  }
  if (min_distance <= 1 || candidates.size() < 2) return candidates;

  std::vector<size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return x(candidates[a]) > x(candidates[b]); });
  std::vector<bool> keep(candidates.size(), true);
  for (size_t a : order) {
    if (!keep[a]) continue;
    for (size_t b = 0; b < candidates.size(); ++b)
      if (b != a && keep[b] && std::abs(candidates[b] - candidates[a]) < min_distance) keep[b] = false;
  }
  Indices out;
  for (size_t k = 0; k < candidates.size(); ++k)
    if (keep[k]) out.push_back(candidates[k]);
  return out;
}

MotionCurve negate(const MotionCurve& curve) {
  MotionCurve out{Eigen::VectorXd(curve.size()), curve.stage};
  if (curve.size() > 0) out.values = (curve.values.maxCoeff() - curve.values.array()).matrix();
  return out;
}

Indices detect_valleys(const MotionCurve& curve, Index min_distance, double min_prominence) {
  require_normalized(curve);
  return detect_peaks(negate(curve), min_distance, min_prominence);
}

Extrema detect_extrema(const MotionCurve& curve, Index min_distance, double min_prominence) {
  return {detect_peaks(curve, min_distance, min_prominence), detect_valleys(curve, min_distance, min_prominence)};
}

MotionCurve prepare(const MotionCurve& raw, Index window) { return normalize(smooth(raw, window)); }

}  // namespace keysched::motion
