#pragma once

#include "keysched/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace keysched::schedule {

/// Length-T conditioning tensor. Rows with mask 0 are exactly zero.
struct ConditionLayout {
  Index total_frames = 0;
  Eigen::VectorXi mask;
  FeatureMatrix features;
};

struct WindowPlan {
  Index total_frames = 0;
  Index window = 0;
  Index stride = 0;
  std::vector<std::pair<Index, Index>> windows;  // [start, end)
};

/// Keyframe feature rows placed at their frame indices, zeros elsewhere.
ConditionLayout interpolation_layout(const FeatureMatrix& keyframe_feats, const KeyframeSchedule& schedule);

/// The single first-frame row repeated over all `t` frames.
ConditionLayout firstframe_layout(const FeatureMatrix& first_feat, Index t);

/// Windows at 0, stride, 2*stride, ... while they fit, plus a final window
/// flush with the end when the last regular one stops short.
WindowPlan freenoise_windows(Index t, Index window = 12, Index stride = 6);

/// Sinusoidal index code: columns (2k, 2k+1) hold sin and cos of
/// p / 10000^(2k/c).
FeatureMatrix frame_index_embedding(const Indices& indices, Index c);

std::string window_plan_to_json(const WindowPlan& plan);
std::string layout_to_json(const ConditionLayout& layout);

}  // namespace keysched::schedule
