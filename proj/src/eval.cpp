#include "keysched/eval.hpp"

#include "keysched/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace keysched::eval {

namespace {

Indices parse_index_list(const std::string& body, size_t line_no) {
  Indices out;
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    char* stop = nullptr;
    const long v = std::strtol(item.c_str(), &stop, 10);
    if (*stop != '\0' || v < 0)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad index '" + item + "'");
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Index match_keypoints(const Indices& gt, const Indices& pred, double t, bool strict) {
  if (!(t >= 0)) throw Error(ErrorCode::InvalidArgument, "distance threshold must be non-negative");
  auto allowed = [&](Index g, Index p) {
    const auto d = static_cast<double>(std::abs(g - p));
    return strict ? d < t : d <= t;
  };

  std::vector<Index> owner(pred.size(), -1);  // gt index matched to each prediction
  std::vector<char> seen;
  std::function<bool(size_t)> augment = [&](size_t g) {
    for (size_t p = 0; p < pred.size(); ++p) {
      if (seen[p] || !allowed(gt[g], pred[p])) continue;
      seen[p] = 1;
      if (owner[p] < 0 || augment(static_cast<size_t>(owner[p]))) {
        owner[p] = static_cast<Index>(g);
        return true;
      }
    }
    return false;
  };

  Index matched = 0;
  for (size_t g = 0; g < gt.size(); ++g) {
    seen.assign(pred.size(), 0);
    if (augment(g)) ++matched;
  }
  return matched;
}

double average_precision(const std::vector<KeypointInstance>& instances, double t, bool strict) {
  double sum = 0.0;
  Index counted = 0;
  for (const auto& inst : instances) {
    if (inst.gt.empty()) continue;
    sum += static_cast<double>(match_keypoints(inst.gt, inst.pred, t, strict)) / static_cast<double>(inst.gt.size());
    ++counted;
  }
  if (counted == 0) throw Error(ErrorCode::NoValidInstances, "no instance has ground-truth keypoints");
  return sum / static_cast<double>(counted);
}

IntensityBuckets intensity_buckets(const std::map<std::string, double>& class_means) {
  if (class_means.empty() || class_means.size() % 3 != 0)
    throw Error(ErrorCode::NotDivisibleByThree, std::to_string(class_means.size()) + " classes");
  std::vector<std::pair<std::string, double>> order(class_means.begin(), class_means.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  const size_t third = order.size() / 3;
  IntensityBuckets out;
  for (size_t i = 0; i < order.size(); ++i) {
    auto& bucket = i < third ? out.subtle : (i < 2 * third ? out.moderate : out.intense);
    bucket.push_back(order[i].first);
  }
  return out;
}

std::vector<KeypointInstance> parse_instances(std::string_view text) {
  std::vector<KeypointInstance> out;
  std::stringstream ss{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream fields(line);
    std::string gt_field, pred_field, extra;
    fields >> gt_field >> pred_field;
    if (fields >> extra || gt_field.rfind("gt:", 0) != 0 || pred_field.rfind("pred:", 0) != 0)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'gt:... pred:...'");
    out.push_back({parse_index_list(gt_field.substr(3), line_no), parse_index_list(pred_field.substr(5), line_no)});
  }
  return out;
}

}  // namespace keysched::eval
