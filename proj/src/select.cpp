#include "keysched/select.hpp"

#include "keysched/error.hpp"
#include "keysched/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace keysched::select {

namespace {

void check_indices(const Indices& idx, Index total, const char* what) {
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= total)
      throw Error(ErrorCode::InconsistentExtrema, std::string(what) + " index " + std::to_string(idx[i]) + " out of range");
    if (i > 0 && idx[i] <= idx[i - 1])
      throw Error(ErrorCode::InconsistentExtrema, std::string(what) + " not strictly increasing");
  }
}

// Nearest free index in (lo, hi) to `target`, lower one first on equal distance.
Index nearest_free(Index target, Index lo, Index hi, const std::set<Index>& used) {
  for (Index d = 0; d <= hi - lo; ++d) {
    for (Index cand : {target - d, target + d})
      if (cand > lo && cand < hi && !used.contains(cand)) return cand;
  }
  throw Error(ErrorCode::InvariantViolation, "no free frame inside gap");
}

}  // namespace

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return r % bound;
}

Index round_half_away(double x) { return static_cast<Index>(std::round(x)); }

std::optional<Index> valley_between(const MotionCurve& curve, const Indices& valleys, Index p1, Index p2) {
  if (p1 >= p2) throw Error(ErrorCode::BadInterval, "p1 must be < p2");
  if (p1 < 0 || p2 > curve.size()) throw Error(ErrorCode::IndexOutOfRange, "interval outside curve");
  if (p2 - p1 < 2) return std::nullopt;
  const auto& x = curve.values;

  std::optional<Index> best;
  for (Index v : valleys)
    if (v > p1 && v < p2 && (!best || x(v) < x(*best))) best = v;
  if (best) return best;

  Index arg = p1 + 1;
  for (Index i = p1 + 2; i < p2; ++i)
    if (x(i) < x(arg)) arg = i;
  return arg;
}

Indices choose_peaks(const Indices& peaks, const Eigen::Ref<const Eigen::VectorXd>& prominences, Index limit,
                     const SelectionParams& params) {
  if (limit < 0) throw Error(ErrorCode::InvalidArgument, "limit must be non-negative");
  if (static_cast<Index>(peaks.size()) != prominences.size())
    throw Error(ErrorCode::CountMismatch, "one prominence per peak required");
  const auto n = static_cast<Index>(peaks.size());
  if (limit >= n) {
    Indices all = peaks;
    std::sort(all.begin(), all.end());
    return all;
  }

  Indices out;
  if (params.mode == PeakChoice::ByProminence) {
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      if (prominences(a) != prominences(b)) return prominences(a) > prominences(b);
      return peaks[static_cast<size_t>(a)] < peaks[static_cast<size_t>(b)];
    });
    for (Index i = 0; i < limit; ++i) out.push_back(peaks[static_cast<size_t>(order[static_cast<size_t>(i)])]);
  } else {
    Indices pool = peaks;
    SplitMix64 rng(params.seed);
    for (Index i = 0; i < limit; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    }
    out.assign(pool.begin(), pool.begin() + limit);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> apportion(Index total, const std::vector<Index>& weights, const std::vector<Index>& capacity) {
  if (weights.size() != capacity.size()) throw Error(ErrorCode::CountMismatch, "weights and capacity differ in size");
  const Index weight_sum = std::accumulate(weights.begin(), weights.end(), Index{0});
  const Index cap_sum = std::accumulate(capacity.begin(), capacity.end(), Index{0});
  if (total < 0 || total > cap_sum) throw Error(ErrorCode::InvalidArgument, "cannot place " + std::to_string(total) + " frames");
  std::vector<Index> alloc(weights.size(), 0);
  if (total == 0) return alloc;
  if (weight_sum <= 0) throw Error(ErrorCode::InvalidArgument, "weights sum to zero");

  // ideal_i = total * w_i / W, kept as exact integer quotient and remainder.
  std::vector<Index> remainder(weights.size());
  Index given = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    alloc[i] = total * weights[i] / weight_sum;
    remainder[i] = total * weights[i] % weight_sum;
    given += alloc[i];
  }
  std::vector<size_t> order(weights.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return remainder[a] > remainder[b]; });
  for (Index j = 0; j < total - given; ++j) ++alloc[order[static_cast<size_t>(j)]];

  Index overflow = 0;
  for (size_t i = 0; i < alloc.size(); ++i) {
    if (alloc[i] > capacity[i]) {
      overflow += alloc[i] - capacity[i];
      alloc[i] = capacity[i];
    }
  }
  while (overflow > 0) {
    size_t best = 0;
    for (size_t i = 1; i < alloc.size(); ++i)
      if (capacity[i] - alloc[i] > capacity[best] - alloc[best]) best = i;
    ++alloc[best];
    --overflow;
  }
  return alloc;
}

KeyframeSchedule select_keyframes(const MotionCurve& curve, const Extrema& extrema, const SelectionParams& params) {
  const Index total = curve.size();
  if (params.t_k < 2 || params.t_k >= total)
    throw Error(ErrorCode::InvalidK, "t_k=" + std::to_string(params.t_k) + " needs 2 <= t_k < " + std::to_string(total));
  if (curve.stage != CurveStage::Normalized) throw Error(ErrorCode::NotNormalized, "selection needs a normalized curve");
  check_indices(extrema.peaks, total, "peak");
  check_indices(extrema.valleys, total, "valley");

  KeyframeSchedule out;
  out.total_frames = total;
  std::set<Index> used{0};

  const Index peak_limit = std::max<Index>(params.t_k / 2 - 1, 0);
  Indices usable_peaks;
  for (Index p : extrema.peaks)
    if (p != 0) usable_peaks.push_back(p);
  const Eigen::VectorXd prom = motion::peak_prominences(curve.values, usable_peaks);
  out.peaks = choose_peaks(usable_peaks, prom, peak_limit, params);
  used.insert(out.peaks.begin(), out.peaks.end());

  for (size_t i = 1; i < out.peaks.size(); ++i) {
    const auto valley = valley_between(curve, extrema.valleys, out.peaks[i - 1], out.peaks[i]);
    if (valley && !used.contains(*valley)) {
      out.valleys.push_back(*valley);
      used.insert(*valley);
    }
  }

  const Index remaining = params.t_k - static_cast<Index>(used.size());
  if (remaining > 0) {
    // Gaps run between consecutive selected frames; the last one ends at the
    // virtual boundary `total`.
    const Indices anchors(used.begin(), used.end());
    std::vector<Index> weights;
    for (size_t g = 0; g < anchors.size(); ++g) {
      const Index end = g + 1 < anchors.size() ? anchors[g + 1] : total;
      weights.push_back(end - anchors[g] - 1);
    }
    const auto alloc = apportion(remaining, weights, weights);
    for (size_t g = 0; g < anchors.size(); ++g) {
      const Index a = anchors[g];
      const Index b = g + 1 < anchors.size() ? anchors[g + 1] : total;
      const Index k = alloc[g];
      for (Index j = 1; j <= k; ++j) {
        // round(j * (b - a) / (k + 1)), half away from zero, in integers
        Index pos = a + (2 * j * (b - a) + (k + 1)) / (2 * (k + 1));
        if (pos <= a || pos >= b || used.contains(pos)) pos = nearest_free(pos, a, b, used);
        used.insert(pos);
        out.fill.push_back(pos);
      }
    }
    std::sort(out.fill.begin(), out.fill.end());
  }

  out.keyframes.assign(used.begin(), used.end());
  return out;
}

}  // namespace keysched::select
