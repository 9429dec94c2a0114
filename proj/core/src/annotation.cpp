#include "speedbench/annotation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

AnnotationParams preset(AnnotationPreset which) {
  AnnotationParams p;
  p.horizon = 40;
  p.fps = 10;
  p.t_min = 0.5;
  if (which == AnnotationPreset::Long) {
    p.t_max = 3.0;
    p.max_extend = 10.0;
  } else {
    p.t_max = 1.5;
    p.max_extend = 3.0;
  }
  return p;
}

AnnotationPreset parse_preset(std::string_view name) {
  if (name == "long" || name == "Long") return AnnotationPreset::Long;
  if (name == "short" || name == "Short") return AnnotationPreset::Short;
  throw ValidationError(fmt::format("unknown annotation preset '{}' (expected long or short)", name));
}

void validate(const AnnotationParams& p) {
  if (p.horizon < 1) throw ValidationError("annotation horizon must be >= 1");
  if (p.fps < 1) throw ValidationError("annotation fps must be >= 1");
  if (!(p.t_min >= 0.0 && p.t_min <= p.t_max)) {
    throw ValidationError(fmt::format("need 0 <= t_min <= t_max, got [{}, {}]", p.t_min, p.t_max));
  }
  if (!(p.max_extend > 0.0)) throw ValidationError("max_extend must be > 0");
}

double tendency_speed(std::span<const double> trace, std::size_t t, int horizon) {
  const double now = trace[t];
  if (t + 1 >= trace.size()) return now;
  const auto first = trace.begin() + static_cast<std::ptrdiff_t>(t + 1);
  const auto last =
      trace.begin() + static_cast<std::ptrdiff_t>(std::min(trace.size(), t + 1 + static_cast<std::size_t>(horizon)));
  if (trace[t + 1] > now) return *std::max_element(first, last);
  if (trace[t + 1] < now) return *std::min_element(first, last);
  return now;
}

double unit_draw(std::uint64_t seed, std::uint64_t stream, std::size_t t) {
  const std::uint64_t key = mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL) ^ static_cast<std::uint64_t>(t));
  return static_cast<double>(mix(key) >> 11) * 0x1.0p-53;
}

double extrapolation_factor(const AnnotationParams& params, std::uint64_t stream, std::size_t t) {
  return params.t_min + (params.t_max - params.t_min) * unit_draw(params.seed, stream, t);
}

AnnotatedTrace virtual_target_speed(std::span<const double> trace, const AnnotationParams& params,
                                    std::uint64_t stream) {
  validate(params);
  if (trace.size() < 2) {
    throw TraceTooShort(fmt::format("trace has {} sample(s); need at least 2", trace.size()));
  }
  AnnotatedTrace out(trace.size());
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out[t].v = trace[t];
    out[t].v_tend = tendency_speed(trace, t, params.horizon);
  }
  out[0].v_virt = out[0].v_tend;
  for (std::size_t t = 1; t < trace.size(); ++t) {
    const double r = extrapolation_factor(params, stream, t);
    const double dv = std::clamp((out[t].v_tend - out[t - 1].v_tend) * params.fps * r,
                                 -params.max_extend, params.max_extend);
    double virt = std::max(out[t].v_tend + dv, 0.0);
    // Rounding in tend + dv can overshoot the clip by an ulp.
    while (std::abs(virt - out[t].v_tend) > params.max_extend) virt = std::nextafter(virt, out[t].v_tend);
    out[t].v_virt = virt;
  }
  return out;
}

std::string annotation_csv(const AnnotatedTrace& trace) {
  std::string out = "frame,v,v_tend,v_virt\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f}\n", i, trace[i].v, trace[i].v_tend, trace[i].v_virt);
  }
  return out;
}

std::vector<double> parse_speed_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty()) throw ParseError("speed CSV is empty");

  const auto split = [](std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      cells.push_back(cell);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };

  const auto header = split(lines.front());
  const auto col = std::find(header.begin(), header.end(), "v");
  if (col == header.end()) throw ParseError("speed CSV has no 'v' column");
  const auto idx = static_cast<std::size_t>(col - header.begin());

  std::vector<double> speeds;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (idx >= cells.size()) throw ParseError(fmt::format("speed CSV row {} is missing column 'v'", i + 1));
    double v = 0.0;
    const auto cell = cells[idx];
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
      throw ParseError(fmt::format("speed CSV row {}: '{}' is not a number", i + 1, cell));
    }
    speeds.push_back(v);
  }
  return speeds;
}

}  // namespace speedbench
