#pragma once

#include "keysched/types.hpp"

#include <cstdint>
#include <optional>

namespace keysched::select {

enum class PeakChoice { ByProminence, SeededRandom };

struct SelectionParams {
  Index t_k = 12;
  PeakChoice mode = PeakChoice::ByProminence;
  std::uint64_t seed = 0;
};

/// SplitMix64; the caller owns the state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

/// Round half away from zero.
Index round_half_away(double x);

/// Valley to keep between two chosen peaks: the lowest detected valley
/// strictly inside (p1, p2), else the interval argmin (lowest index on
/// ties), else nullopt when the open interval is empty.
std::optional<Index> valley_between(const MotionCurve& curve, const Indices& valleys, Index p1, Index p2);

/// Up to `limit` peaks, returned ascending. ByProminence keeps the most
/// prominent (ties: lower index); SeededRandom draws a partial Fisher-Yates
/// sample driven by SplitMix64(params.seed).
Indices choose_peaks(const Indices& peaks, const Eigen::Ref<const Eigen::VectorXd>& prominences, Index limit,
                     const SelectionParams& params);

/// Largest-remainder apportionment of `total` seats over `weights`. Ties in
/// the fractional part go to the lower position. No entry exceeds its
/// `capacity`; overflow moves to the entry with the largest spare capacity.
std::vector<Index> apportion(Index total, const std::vector<Index>& weights, const std::vector<Index>& capacity);

/// Keyframe selection: frame 0, up to floor(t_k/2) - 1 peaks, one valley
/// between each consecutive pair of chosen peaks, then largest-remainder
/// fill spread evenly inside the gaps between selected frames.
KeyframeSchedule select_keyframes(const MotionCurve& curve, const Extrema& extrema, const SelectionParams& params);

}  // namespace keysched::select
