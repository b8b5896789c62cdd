#pragma once

#include "keysched/types.hpp"

#include <optional>
#include <string>

namespace keysched::plot {

struct PlotSpec {
  int width = 800;
  int height = 300;
  MotionCurve curve;
  Extrema extrema;
  std::optional<KeyframeSchedule> schedule;
};

/// Standalone SVG: the curve as one polyline, peaks as up-triangles,
/// valleys as down-triangles, keyframes as vertical lines.
std::string render_svg(const PlotSpec& spec);

}  // namespace keysched::plot
