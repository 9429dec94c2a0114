#include "speedbench/scenario_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

namespace pt = boost::property_tree;

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double to_double(std::string_view attr, const std::string& raw) {
  double value = 0.0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  // Tolerate surrounding whitespace, nothing else.
  while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last != first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(value)) {
    throw ValidationError(fmt::format("attribute '{}': '{}' is not a finite number", attr, raw));
  }
  return value;
}

std::uint64_t to_u64(std::string_view attr, const std::string& raw) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty()) {
    throw ValidationError(fmt::format("attribute '{}': '{}' is not an unsigned integer", attr, raw));
  }
  return value;
}

const pt::ptree* attributes(const pt::ptree& node) {
  const auto it = node.find("<xmlattr>");
  return it == node.not_found() ? nullptr : &it->second;
}

std::optional<std::string> attr(const pt::ptree& node, const char* name) {
  const pt::ptree* attrs = attributes(node);
  if (attrs == nullptr) return std::nullopt;
  const auto value = attrs->get_optional<std::string>(name);
  if (!value) return std::nullopt;
  return *value;
}

std::string required_attr(const pt::ptree& node, std::string_view element, const char* name) {
  auto value = attr(node, name);
  if (!value) {
    throw SchemaError(fmt::format("<{}> is missing attribute '{}'", element, name));
  }
  return *value;
}

double required_number(const pt::ptree& node, std::string_view element, const char* name) {
  return to_double(name, required_attr(node, element, name));
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings != nullptr) warnings->push_back(std::move(message));
}

bool is_markup(const std::string& key) { return key == "<xmlattr>" || key == "<xmlcomment>"; }

std::string num(double v) {
  // Avoid "-0.000000" so the canonical form is unique.
  const std::string s = fmt::format("{:.6f}", v);
  return s == "-0.000000" ? std::string("0.000000") : s;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "easy";
}

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::None: return "none";
    case Behavior::Overtake: return "overtake";
    case Behavior::Follow: return "follow";
  }
  return "none";
}

Difficulty parse_difficulty(std::string_view text) {
  const std::string t = lower(text);
  if (t == "easy") return Difficulty::Easy;
  if (t == "medium") return Difficulty::Medium;
  if (t == "hard") return Difficulty::Hard;
  throw ValidationError(fmt::format("unknown difficulty '{}'", text));
}

Behavior parse_behavior(std::string_view text) {
  const std::string t = lower(text);
  if (t == "overtake") return Behavior::Overtake;
  if (t == "follow") return Behavior::Follow;
  if (t == "none") return Behavior::None;
  throw ValidationError(fmt::format("unknown behavior '{}'", text));
}

void validate_config(const ScenarioConfig& cfg) {
  const Route route = Route::build(cfg.waypoints);
  SpeedPlan::build(route, cfg.speed_segments, cfg.default_speed);

  if (cfg.difficulty == Difficulty::Easy && !cfg.scenarios.empty()) {
    throw ValidationError(
        fmt::format("route '{}': easy routes cannot carry overtake/follow scenarios", cfg.route_id));
  }
  for (const auto& sc : cfg.scenarios) {
    if (!(sc.trigger_progress >= 0.0 && sc.trigger_progress <= 1.0)) {
      throw ValidationError(fmt::format("scenario trigger {} outside [0, 1]", sc.trigger_progress));
    }
    if (!(sc.lead_speed > 0.0)) {
      throw ValidationError(fmt::format("scenario lead speed {} must be > 0", sc.lead_speed));
    }
    if (!(sc.spawn_distance > 0.0)) {
      throw ValidationError(fmt::format("scenario distance {} must be > 0", sc.spawn_distance));
    }
    if (!(sc.timeout > 0.0)) {
      throw ValidationError(fmt::format("scenario timeout {} must be > 0", sc.timeout));
    }
    if (sc.behavior == Behavior::None) {
      throw ValidationError("scenario behavior must be overtake or follow");
    }
    if (sc.frequency && !(*sc.frequency >= 0.0)) {
      throw ValidationError(fmt::format("scenario frequency {} must be >= 0", *sc.frequency));
    }
  }
  for (const auto& ob : cfg.obstacles) {
    if (!(ob.s_start >= 0.0 && ob.s_start < ob.s_end && ob.s_end <= 1.0)) {
      throw ValidationError(
          fmt::format("obstacle [{}, {}] is not a valid sub-interval of [0, 1]", ob.s_start, ob.s_end));
    }
  }
}

ScenarioConfig parse_config(std::string_view text, std::vector<std::string>* warnings) {
  pt::ptree doc;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(fmt::format("malformed XML: {}", e.what()));
  }

  const pt::ptree* route_node = nullptr;
  for (const auto& [key, child] : doc) {
    if (key == "route") {
      route_node = &child;
    } else if (key == "routes") {
      for (const auto& [inner_key, inner] : child) {
        if (inner_key != "route") continue;
        if (route_node != nullptr) {
          warn(warnings, "multiple <route> elements; only the first is used");
          break;
        }
        route_node = &inner;
      }
    }
    if (route_node != nullptr) break;
  }
  if (route_node == nullptr) throw SchemaError("document has no <route> element");

  ScenarioConfig cfg;
  const pt::ptree& route = *route_node;
  cfg.route_id = attr(route, "id").value_or("route");
  if (auto d = attr(route, "difficulty")) cfg.difficulty = parse_difficulty(*d);
  if (auto s = attr(route, "seed")) cfg.seed = to_u64("seed", *s);
  if (auto v = attr(route, "default_speed")) cfg.default_speed = to_double("default_speed", *v);
  cfg.weather = attr(route, "weather").value_or("");

  bool saw_waypoints = false;
  for (const auto& [key, child] : route) {
    if (is_markup(key)) continue;
    if (key == "waypoints") {
      saw_waypoints = true;
      for (const auto& [wp_key, wp] : child) {
        if (is_markup(wp_key)) continue;
        if (wp_key != "wp" && wp_key != "waypoint") {
          warn(warnings, fmt::format("ignoring <{}> inside <waypoints>", wp_key));
          continue;
        }
        cfg.waypoints.push_back({required_number(wp, wp_key, "x"), required_number(wp, wp_key, "y")});
      }
    } else if (key == "speed") {
      cfg.speed_segments.push_back({required_number(child, key, "from"),
                                    required_number(child, key, "to"),
                                    required_number(child, key, "v")});
    } else if (key == "obstacle") {
      cfg.obstacles.push_back(
          {required_number(child, key, "from"), required_number(child, key, "to")});
    } else if (key == "scenario") {
      const std::string type = attr(child, "type").value_or("OvertakeRoute");
      if (type != "OvertakeRoute") {
        warn(warnings, fmt::format("ignoring scenario of unsupported type '{}'", type));
        continue;
      }
      OvertakeSpec spec;
      spec.behavior = parse_behavior(required_attr(child, key, "behavior"));
      spec.lead_speed = required_number(child, key, "speed");
      spec.spawn_distance = required_number(child, key, "distance");
      if (auto t = attr(child, "trigger")) spec.trigger_progress = to_double("trigger", *t);
      if (auto t = attr(child, "timeout")) spec.timeout = to_double("timeout", *t);
      if (auto f = attr(child, "frequency"); f && !f->empty()) {
        spec.frequency = to_double("frequency", *f);
      }
      cfg.scenarios.push_back(spec);
    } else {
      warn(warnings, fmt::format("ignoring unknown element <{}>", key));
    }
  }
  if (!saw_waypoints) throw SchemaError(fmt::format("route '{}' has no <waypoints>", cfg.route_id));

  std::stable_sort(cfg.speed_segments.begin(), cfg.speed_segments.end(),
                   [](const SpeedSegment& a, const SpeedSegment& b) { return a.s_start < b.s_start; });
  validate_config(cfg);
  return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::vector<SpeedSegment> segments = cfg.speed_segments;
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SpeedSegment& a, const SpeedSegment& b) { return a.s_start < b.s_start; });

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out += fmt::format("<route id=\"{}\" difficulty=\"{}\" seed=\"{}\" default_speed=\"{}\" weather=\"{}\">\n",
                     escape(cfg.route_id), to_string(cfg.difficulty), cfg.seed,
                     num(cfg.default_speed), escape(cfg.weather));
  out += "  <waypoints>\n";
  for (const Vec2 wp : cfg.waypoints) {
    out += fmt::format("    <wp x=\"{}\" y=\"{}\"/>\n", num(wp.x), num(wp.y));
  }
  out += "  </waypoints>\n";
  for (const auto& seg : segments) {
    out += fmt::format("  <speed from=\"{}\" to=\"{}\" v=\"{}\"/>\n", num(seg.s_start),
                       num(seg.s_end), num(seg.v));
  }
  for (const auto& ob : cfg.obstacles) {
    out += fmt::format("  <obstacle from=\"{}\" to=\"{}\"/>\n", num(ob.s_start), num(ob.s_end));
  }
  for (const auto& sc : cfg.scenarios) {
    out += fmt::format(
        "  <scenario type=\"OvertakeRoute\" behavior=\"{}\" trigger=\"{}\" speed=\"{}\" "
        "distance=\"{}\"",
        to_string(sc.behavior), num(sc.trigger_progress), num(sc.lead_speed),
        num(sc.spawn_distance));
    if (sc.frequency) out += fmt::format(" frequency=\"{}\"", num(*sc.frequency));
    out += fmt::format(" timeout=\"{}\"/>\n", num(sc.timeout));
  }
  out += "</route>\n";
  return out;
}

std::string config_digest(const ScenarioConfig& cfg) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_config(cfg)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

}  // namespace speedbench
