#pragma once

#include "keysched/types.hpp"

namespace keysched::motion {

inline constexpr Index kDefaultSmoothWindow = 5;
inline constexpr Index kDefaultMinDistance = 5;
inline constexpr double kDefaultMinProminence = 0.1;

/// Centered moving average. Near the ends the window shrinks symmetrically,
/// so index i averages [i - k, i + k] with k = min(window / 2, i, n - 1 - i).
MotionCurve smooth(const MotionCurve& curve, Index window = kDefaultSmoothWindow);

/// Min-max rescale to [0,1]; a constant curve maps to all zeros.
MotionCurve normalize(const MotionCurve& curve);

/// Strict local maxima. A flat run that rises on the left and falls on the
/// right reports its leftmost index. Endpoints are never maxima.
Indices local_maxima(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Topographic prominence of each index in `peaks`: height minus the higher
/// of the two minima found walking outward until a strictly higher sample
/// or the array end.
Eigen::VectorXd peak_prominences(const Eigen::Ref<const Eigen::VectorXd>& values, const Indices& peaks);

/// Local maxima with prominence >= `min_prominence`, thinned so that no two
/// survivors are closer than `min_distance` (taller first, then lower index).
/// Requires a normalized curve.
Indices detect_peaks(const MotionCurve& curve, Index min_distance = kDefaultMinDistance,
                     double min_prominence = kDefaultMinProminence);

/// detect_peaks on max(curve) - curve.
Indices detect_valleys(const MotionCurve& curve, Index min_distance = kDefaultMinDistance,
                       double min_prominence = kDefaultMinProminence);

/// Affine negation used for valley detection; keeps values in [0,1].
MotionCurve negate(const MotionCurve& curve);

Extrema detect_extrema(const MotionCurve& curve, Index min_distance = kDefaultMinDistance,
                       double min_prominence = kDefaultMinProminence);

/// smooth -> normalize, the preprocessing every selection path uses.
MotionCurve prepare(const MotionCurve& raw, Index window = kDefaultSmoothWindow);

}  // namespace keysched::motion
