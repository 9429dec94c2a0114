#include "speedbench/trajectory_log.hpp"

#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "speedbench/errors.hpp"

namespace speedbench {

namespace {

using nlohmann::json;

std::string g9(double v) { return fmt::format("{:.9g}", v); }

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

std::string meta_line(const LogMeta& meta) {
  std::string out = fmt::format(
      "{{\"route_id\":{},\"seed\":{},\"config_digest\":{},\"difficulty\":\"{}\",\"policy\":{},"
      "\"fps\":{},\"termination\":\"{}\",\"collisions\":{},\"outcomes\":[",
      json_string(meta.route_id), meta.seed, json_string(meta.config_digest), to_string(meta.difficulty),
      json_string(meta.policy), kFps, to_string(meta.termination), meta.collisions);
  for (std::size_t i = 0; i < meta.outcomes.size(); ++i) {
    const auto& o = meta.outcomes[i];
    out += fmt::format(
        "{}{{\"triggered\":{},\"commanded\":\"{}\",\"ego_finished_ahead\":{},"
        "\"ego_ever_passed\":{},\"timed_out\":{},\"collision\":{}}}",
        i == 0 ? "" : ",", o.triggered, to_string(o.commanded), o.ego_finished_ahead,
        o.ego_ever_passed, o.timed_out, o.collision);
  }
  out += "]}";
  return out;
}

std::string frame_line(const LogFrame& f) {
  std::string lead = "\"lead_x\":null,\"lead_y\":null,\"lead_s\":null,\"lead_speed\":null";
  if (f.lead) {
    lead = fmt::format("\"lead_x\":{},\"lead_y\":{},\"lead_s\":{},\"lead_speed\":{}", g9(f.lead->pos.x),
                       g9(f.lead->pos.y), g9(f.lead->s), g9(f.lead->speed));
  }
  return fmt::format(
      "{{\"frame\":{},\"t\":{},\"x\":{},\"y\":{},\"s\":{},\"speed\":{},\"accel\":{},"
      "\"lane_offset\":{},\"heading\":{},{},\"target_speed\":{},\"behavior\":\"{}\"}}",
      f.frame, g9(f.t), g9(f.pos.x), g9(f.pos.y), g9(f.s), g9(f.speed), g9(f.accel),
      g9(f.lane_offset), g9(f.heading), lead, g9(f.target_speed), to_string(f.behavior));
}

template <typename T>
T field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("log line {}: missing key '{}'", line, key));
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("log line {}: key '{}': {}", line, key, e.what()));
  }
}

}  // namespace

LogFrame capture_frame(const WorldState& state) {
  LogFrame f;
  f.frame = state.frame;
  f.t = state.t;
  f.pos = state.ego.pos;
  f.s = state.ego.s;
  f.speed = state.ego.speed;
  f.accel = state.ego.accel;
  f.lane_offset = state.ego.lane_offset;
  f.heading = state.ego.heading;
  if (state.lead) f.lead = LeadSample{state.lead->pos, state.lead->speed, state.lead->s};
  f.target_speed = state.active_target_speed;
  f.behavior = state.active_behavior;
  return f;
}

void write_jsonl(std::ostream& out, const TrajectoryLog& log) {
  out << meta_line(log.meta) << '\n';
  for (const auto& f : log.frames) out << frame_line(f) << '\n';
}

std::string to_jsonl(const TrajectoryLog& log) {
  std::ostringstream out;
  write_jsonl(out, log);
  return out.str();
}

TrajectoryLog parse_jsonl(std::string_view text) {
  TrajectoryLog log;
  std::size_t line_no = 0;
  bool have_meta = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("log line {}: {}", line_no, e.what()));
    }
    if (!obj.is_object()) throw ParseError(fmt::format("log line {}: expected an object", line_no));

    if (!have_meta) {
      have_meta = true;
      LogMeta& m = log.meta;
      m.route_id = field<std::string>(obj, "route_id", line_no);
      m.seed = field<std::uint64_t>(obj, "seed", line_no);
      m.config_digest = field<std::string>(obj, "config_digest", line_no);
      try {
        m.difficulty = parse_difficulty(field<std::string>(obj, "difficulty", line_no));
        m.termination = parse_termination(field<std::string>(obj, "termination", line_no));
      } catch (const ValidationError& e) {
        throw ParseError(fmt::format("log line {}: {}", line_no, e.what()));
      }
      m.policy = obj.value("policy", std::string{});
      m.collisions = obj.value("collisions", 0);
      if (obj.value("fps", kFps) != kFps) {
        throw ParseError(fmt::format("log line {}: unsupported frame rate", line_no));
      }
      for (const auto& o : obj.value("outcomes", json::array())) {
        ScenarioOutcome out;
        out.triggered = field<bool>(o, "triggered", line_no);
        out.commanded = parse_behavior(field<std::string>(o, "commanded", line_no));
        out.ego_finished_ahead = field<bool>(o, "ego_finished_ahead", line_no);
        out.ego_ever_passed = field<bool>(o, "ego_ever_passed", line_no);
        out.timed_out = field<bool>(o, "timed_out", line_no);
        out.collision = field<bool>(o, "collision", line_no);
        m.outcomes.push_back(out);
      }
      continue;
    }

    LogFrame f;
    f.frame = field<std::int64_t>(obj, "frame", line_no);
    f.t = field<double>(obj, "t", line_no);
    f.pos = {field<double>(obj, "x", line_no), field<double>(obj, "y", line_no)};
    f.s = field<double>(obj, "s", line_no);
    f.speed = field<double>(obj, "speed", line_no);
    f.accel = field<double>(obj, "accel", line_no);
    f.lane_offset = field<double>(obj, "lane_offset", line_no);
    f.heading = field<double>(obj, "heading", line_no);
    if (obj.contains("lead_x") && !obj["lead_x"].is_null()) {
      f.lead = LeadSample{{field<double>(obj, "lead_x", line_no), field<double>(obj, "lead_y", line_no)},
                          field<double>(obj, "lead_speed", line_no),
                          field<double>(obj, "lead_s", line_no)};
    }
    f.target_speed = field<double>(obj, "target_speed", line_no);
    try {
      f.behavior = parse_behavior(field<std::string>(obj, "behavior", line_no));
    } catch (const ValidationError& e) {
      throw ParseError(fmt::format("log line {}: {}", line_no, e.what()));
    }
    if (f.frame != static_cast<std::int64_t>(log.frames.size())) {
      throw ParseError(fmt::format("log line {}: frame index {} breaks the contiguous sequence",
                                   line_no, f.frame));
    }
    log.frames.push_back(f);
  }
  if (!have_meta) throw ParseError("log is empty");
  return log;
}

}  // namespace speedbench
