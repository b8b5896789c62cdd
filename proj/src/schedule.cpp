#include "keysched/schedule.hpp"

#include "keysched/error.hpp"

#include <json.hpp>

#include <cmath>

namespace keysched::schedule {

ConditionLayout interpolation_layout(const FeatureMatrix& keyframe_feats, const KeyframeSchedule& schedule) {
  if (keyframe_feats.rows() != static_cast<Index>(schedule.keyframes.size()))
    throw Error(ErrorCode::CountMismatch, std::to_string(keyframe_feats.rows()) + " feature rows for " +
                                              std::to_string(schedule.keyframes.size()) + " keyframes");
  const Index t = schedule.total_frames;
  ConditionLayout layout{t, Eigen::VectorXi::Zero(t), FeatureMatrix::Zero(t, keyframe_feats.cols())};
  for (size_t i = 0; i < schedule.keyframes.size(); ++i) {
    const Index k = schedule.keyframes[i];
    if (k < 0 || k >= t) throw Error(ErrorCode::IndexOutOfRange, "keyframe " + std::to_string(k) + " outside layout");
    if (layout.mask(k) != 0) throw Error(ErrorCode::InvariantViolation, "duplicate keyframe " + std::to_string(k));
    layout.mask(k) = 1;
    layout.features.row(k) = keyframe_feats.row(static_cast<Index>(i));
  }
  return layout;
}

ConditionLayout firstframe_layout(const FeatureMatrix& first_feat, Index t) {
  if (first_feat.rows() != 1) throw Error(ErrorCode::ShapeMismatch, "first-frame feature must be a single row");
  if (t < 1) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  return {t, Eigen::VectorXi::Ones(t), first_feat.replicate(t, 1)};
}

WindowPlan freenoise_windows(Index t, Index window, Index stride) {
  if (stride < 1 || stride > window || window > t)
    throw Error(ErrorCode::BadGeometry, "need 1 <= stride <= window <= t, got stride " + std::to_string(stride) +
                                            ", window " + std::to_string(window) + ", t " + std::to_string(t));
  WindowPlan plan{t, window, stride, {}};
  for (Index start = 0; start + window <= t; start += stride) plan.windows.emplace_back(start, start + window);
  if (plan.windows.back().second != t) plan.windows.emplace_back(t - window, t);
  return plan;
}

FeatureMatrix frame_index_embedding(const Indices& indices, Index c) {
  if (c < 2 || c % 2 != 0) throw Error(ErrorCode::OddDim, "embedding width must be even and >= 2, got " + std::to_string(c));
  FeatureMatrix emb(static_cast<Index>(indices.size()), c);
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0) throw Error(ErrorCode::IndexOutOfRange, "negative frame index");
    const auto p = static_cast<double>(indices[i]);
    for (Index k = 0; k < c / 2; ++k) {
      const double angle = p / std::pow(10000.0, static_cast<double>(2 * k) / static_cast<double>(c));
      emb(static_cast<Index>(i), 2 * k) = std::sin(angle);
      emb(static_cast<Index>(i), 2 * k + 1) = std::cos(angle);
    }
  }
  return emb;
}

std::string window_plan_to_json(const WindowPlan& plan) {
  nlohmann::ordered_json j;
  j["total_frames"] = plan.total_frames;
  j["window"] = plan.window;
  j["stride"] = plan.stride;
  j["windows"] = nlohmann::ordered_json::array();
  for (const auto& [start, end] : plan.windows) j["windows"].push_back({start, end});
  return j.dump(2) + "\n";
}

std::string layout_to_json(const ConditionLayout& layout) {
  nlohmann::ordered_json j;
  j["total_frames"] = layout.total_frames;
  j["mask"] = std::vector<int>(layout.mask.data(), layout.mask.data() + layout.mask.size());
  j["features"] = nlohmann::ordered_json::array();
  for (Index r = 0; r < layout.features.rows(); ++r) {
    std::vector<double> row(static_cast<size_t>(layout.features.cols()));
    for (Index c = 0; c < layout.features.cols(); ++c) row[static_cast<size_t>(c)] = layout.features(r, c);
    j["features"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace keysched::schedule
