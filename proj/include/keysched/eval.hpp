#pragma once

#include "keysched/types.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace keysched::eval {

struct KeypointInstance {
  Indices gt;
  Indices pred;
};

struct IntensityBuckets {
  std::vector<std::string> subtle;
  std::vector<std::string> moderate;
  std::vector<std::string> intense;
};

/// Maximum one-to-one matching between gt and pred where a pair is allowed
/// when |g - p| <= t (or < t with `strict`). Kuhn's augmenting paths.
Index match_keypoints(const Indices& gt, const Indices& pred, double t, bool strict = false);

/// Mean over instances with non-empty gt of matched / |gt|.
double average_precision(const std::vector<KeypointInstance>& instances, double t, bool strict = false);

/// Lowest third by mean score -> subtle, middle -> moderate, top -> intense.
/// Equal scores order by class name.
IntensityBuckets intensity_buckets(const std::map<std::string, double>& class_means);

/// One instance per non-empty line: `gt:1;2;3 pred:4;5`. Either list may be empty.
std::vector<KeypointInstance> parse_instances(std::string_view text);

}  // namespace keysched::eval
