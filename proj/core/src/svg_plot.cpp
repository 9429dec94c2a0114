#include "speedbench/svg_plot.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace speedbench {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

/// Round a span up to a 1-2-5 tick step.
double nice_step(double span, int ticks) {
  const double raw = span / std::max(ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string speed_profile_svg(const TrajectoryLog& log, const Route& route, const SpeedPlan& plan,
                              const PlotOptions& options) {
  std::vector<Vec2> actual;
  std::vector<Vec2> target;
  actual.reserve(log.frames.size());
  target.reserve(log.frames.size());
  double v_max = 1.0;
  for (const auto& f : log.frames) {
    const double s = route.project(f.pos);
    actual.push_back({s, f.speed});
    target.push_back({s, plan.speed_at(s)});
    v_max = std::max({v_max, f.speed, target.back().y});
  }
  const double s_max = std::max(route.total_length(), 1.0);
  const double x_step = nice_step(s_max, 8);
  const double y_step = nice_step(v_max * 1.1, 6);
  const double y_top = std::ceil(v_max * 1.1 / y_step) * y_step;

  const double w = options.width;
  const double h = options.height;
  const double plot_w = w - kLeft - kRight;
  const double plot_h = h - kTop - kBottom;
  const auto px = [&](double s) { return kLeft + plot_w * s / s_max; };
  const auto py = [&](double v) { return kTop + plot_h * (1.0 - v / y_top); };

  const auto path = [&](const std::vector<Vec2>& pts) {
    std::string out;
    for (const Vec2 p : pts) out += fmt::format("{}{:.2f},{:.2f}", out.empty() ? "" : " ", px(p.x), py(p.y));
    return out;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      options.width, options.height);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", options.width, options.height);
  const std::string title = options.title.empty() ? log.meta.route_id : options.title;
  svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     w / 2.0, escape(title));

  svg += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double s = 0.0; s <= s_max + 1e-9; s += x_step) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", px(s), kTop, kTop + plot_h);
  }
  for (double v = 0.0; v <= y_top + 1e-9; v += y_step) {
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", kLeft, py(v), kLeft + plot_w);
  }
  svg += "</g>\n<g fill=\"#333333\">\n";
  for (double s = 0.0; s <= s_max + 1e-9; s += x_step) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", px(s),
                       kTop + plot_h + 16.0, s);
  }
  for (double v = 0.0; v <= y_top + 1e-9; v += y_step) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", kLeft - 6.0,
                       py(v) + 4.0, v);
  }
  svg += "</g>\n";
  svg += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#333333\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">arc length [m]</text>\n",
                     kLeft + plot_w / 2.0, h - 14.0);
  svg += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">speed [m/s]</text>\n",
      kTop + plot_h / 2.0);

  svg += fmt::format(
      "<polyline id=\"target\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 3\" "
      "points=\"{}\"/>\n",
      path(target));
  svg += fmt::format(
      "<polyline id=\"actual\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>\n",
      path(actual));

  const double lx = kLeft + plot_w - 150.0;
  svg += fmt::format(
      "<g><line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#d62728\" stroke-width=\"2\" "
      "stroke-dasharray=\"6 3\"/><text x=\"{3:.1f}\" y=\"{4:.1f}\">target speed</text>\n",
      lx, kTop + 14.0, lx + 24.0, lx + 30.0, kTop + 18.0);
  svg += fmt::format(
      "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>"
      "<text x=\"{3:.1f}\" y=\"{4:.1f}\">actual speed</text></g>\n",
      lx, kTop + 32.0, lx + 24.0, lx + 30.0, kTop + 36.0);
  svg += "</svg>\n";
  return svg;
}

}  // namespace speedbench
