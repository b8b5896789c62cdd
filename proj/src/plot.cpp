#include "keysched/plot.hpp"

#include "keysched/error.hpp"

#include <cstdio>

namespace keysched::plot {

namespace {

constexpr double kMargin = 30.0;
constexpr double kMarker = 5.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw Error(ErrorCode::InvalidArgument, "plot dimensions must be positive");
  if (spec.curve.size() < 1) throw Error(ErrorCode::InvalidArgument, "empty curve");

  const auto& y = spec.curve.values;
  const Index n = y.size();
  const double lo = y.minCoeff();
  const double hi = y.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  const double plot_w = spec.width - 2 * kMargin;
  const double plot_h = spec.height - 2 * kMargin;
  auto px = [&](Index i) { return kMargin + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0); };
  auto py = [&](double v) { return kMargin + plot_h * (1.0 - (v - lo) / span); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" fill=\"white\"/>\n";
  svg += "  <rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(plot_w) + "\" height=\"" +
         num(plot_h) + "\" fill=\"none\" stroke=\"#999999\"/>\n";

  if (spec.schedule) {
    svg += "  <g class=\"keyframes\" stroke=\"#4a90d9\" stroke-dasharray=\"4 3\">\n";
    for (Index k : spec.schedule->keyframes) {
      if (k < 0 || k >= n) continue;
      svg += "    <line x1=\"" + num(px(k)) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(px(k)) + "\" y2=\"" +
             num(kMargin + plot_h) + "\"/>\n";
    }
    svg += "  </g>\n";
  }

  svg += "  <polyline class=\"curve\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\" points=\"";
  for (Index i = 0; i < n; ++i) {
    if (i > 0) svg += ' ';
    svg += num(px(i)) + "," + num(py(y(i)));
  }
  svg += "\"/>\n";

  svg += "  <g class=\"peaks\" fill=\"#d9534f\">\n";
  for (Index p : spec.extrema.peaks) {
    if (p < 0 || p >= n) continue;
    const double x = px(p), yy = py(y(p));
    svg += "    <polygon points=\"" + num(x) + "," + num(yy - kMarker) + " " + num(x - kMarker) + "," +
           num(yy + kMarker) + " " + num(x + kMarker) + "," + num(yy + kMarker) + "\"/>\n";
  }
  svg += "  </g>\n";

  svg += "  <g class=\"valleys\" fill=\"#5cb85c\">\n";
  for (Index v : spec.extrema.valleys) {
    if (v < 0 || v >= n) continue;
    const double x = px(v), yy = py(y(v));
    svg += "    <polygon points=\"" + num(x) + "," + num(yy + kMarker) + " " + num(x - kMarker) + "," +
           num(yy - kMarker) + " " + num(x + kMarker) + "," + num(yy - kMarker) + "\"/>\n";
  }
  svg += "  </g>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace keysched::plot
