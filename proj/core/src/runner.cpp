#include "speedbench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "speedbench/errors.hpp"
#include "speedbench/svg_plot.hpp"

namespace speedbench {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fnv_hex(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

ordered_json to_json(const BucketSummary& b) {
  ordered_json j;
  j["count"] = b.count;
  if (b.count == 0) return j;
  j["speed_adherence"] = b.speed_adherence;
  j["overtake"] = b.overtake ? ordered_json(*b.overtake) : ordered_json(nullptr);
  j["driving_score"] = b.driving_score;
  j["success_rate"] = b.success_rate;
  j["route_completion"] = b.route_completion;
  j["efficiency"] = b.efficiency;
  j["comfort"] = b.comfort;
  return j;
}

ordered_json to_json(const RouteScore& r) {
  ordered_json j;
  j["route_id"] = r.route_id;
  j["difficulty"] = std::string(to_string(r.difficulty));
  j["speed_adherence"] = r.report.speed_adherence;
  j["overtake"] = r.report.overtake ? ordered_json(*r.report.overtake) : ordered_json(nullptr);
  j["route_completion"] = r.report.route_completion;
  j["safety_penalty"] = r.report.safety_penalty;
  j["driving_score"] = r.report.driving_score;
  j["efficiency"] = r.report.efficiency;
  j["comfort"] = r.report.comfort;
  j["collisions"] = r.report.collisions;
  j["success"] = r.report.success;
  return j;
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["tool"] = "speedbench";
  j["tool_version"] = m.tool_version;
  j["suite"] = m.suite;
  j["policy"] = m.policy;
  j["seed"] = m.seed;
  j["out_dir"] = m.out_dir;
  j["suite_digest"] = m.suite_digest;
  j["routes"] = ordered_json::array();
  for (const auto& r : m.routes) {
    ordered_json e;
    e["route_id"] = r.route_id;
    e["config"] = r.config_file;
    e["config_digest"] = r.config_digest;
    e["log"] = r.log_file;
    e["status"] = r.status;
    e["termination"] = r.termination;
    if (!r.message.empty()) e["error"] = r.message;
    j["routes"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("failed reading '{}'", path.string()));
  return buf.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::vector<SuiteEntry> load_suite(const fs::path& suite_dir) {
  if (!fs::is_directory(suite_dir)) {
    throw IoError(fmt::format("suite directory '{}' does not exist", suite_dir.string()));
  }
  std::vector<fs::path> files;
  const fs::path index = suite_dir / "index.json";
  if (fs::exists(index)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(index));
      for (const auto& name : j.at("routes")) files.push_back(suite_dir / name.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("'{}': {}", index.string(), e.what()));
    }
  } else {
    for (const auto& entry : fs::directory_iterator(suite_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  }
  std::vector<SuiteEntry> suite;
  for (const auto& file : files) suite.push_back({file, parse_config(read_file(file))});
  return suite;
}

std::vector<fs::path> cmd_generate(const GenerateRequest& request) {
  std::vector<Difficulty> levels;
  if (request.difficulty) {
    levels.push_back(*request.difficulty);
  } else {
    levels = {Difficulty::Easy, Difficulty::Medium, Difficulty::Hard};
  }
  std::vector<fs::path> written;
  ordered_json index;
  index["seed"] = request.seed;
  index["count"] = request.count;
  index["difficulties"] = ordered_json::array();
  index["routes"] = ordered_json::array();
  for (const Difficulty d : levels) {
    index["difficulties"].push_back(std::string(to_string(d)));
    for (const auto& cfg : generate_suite(d, request.count, request.seed, request.options)) {
      const std::string name = cfg.route_id + ".xml";
      write_file(request.out_dir / name, serialize_config(cfg));
      written.push_back(request.out_dir / name);
      index["routes"].push_back(name);
    }
  }
  write_file(request.out_dir / "index.json", index.dump(2) + "\n");
  return written;
}

std::unique_ptr<Policy> make_policy(const std::string& id, const ExpertParams& expert) {
  if (id == "expert") return std::make_unique<ExpertPolicy>(expert);
  if (id == "inert") return std::make_unique<InertPolicy>();
  if (id == "lane_keeping") return std::make_unique<LaneKeepingPolicy>(expert);
  if (id.rfind("fixed:", 0) == 0) {
    const std::string raw = id.substr(6);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("bad fixed-speed policy '{}'", id));
    }
    if (!(v >= 0.0)) throw ValidationError(fmt::format("fixed speed must be >= 0 in '{}'", id));
    return std::make_unique<FixedSpeedPolicy>(v, expert.idm);
  }
  throw ValidationError(
      fmt::format("unknown policy '{}' (expected expert, inert, lane_keeping, fixed:<v>, replay:<log>)", id));
}

bool RunManifest::all_ok() const {
  return std::all_of(routes.begin(), routes.end(), [](const RouteStatus& r) { return r.status == "ok"; });
}

RunManifest cmd_run(const RunRequest& request) {
  const std::vector<SuiteEntry> suite = load_suite(request.suite_dir);
  const bool replay = request.policy.rfind("replay:", 0) == 0;
  const fs::path replay_source = replay ? fs::path(request.policy.substr(7)) : fs::path{};
  if (!replay) make_policy(request.policy, request.expert);  // reject bad ids up front

  RunManifest manifest;
  manifest.suite = request.suite_dir.string();
  manifest.policy = request.policy;
  manifest.seed = request.seed;
  manifest.out_dir = request.out_dir.string();
  manifest.routes.resize(suite.size());
  std::string digests;
  for (const auto& entry : suite) digests += config_digest(entry.config);
  manifest.suite_digest = fnv_hex(digests);

  EpisodeOptions options;
  options.time_limit = request.time_limit;

  const auto run_one = [&](std::size_t i) {
    const SuiteEntry& entry = suite[i];
    RouteStatus& status = manifest.routes[i];
    status.route_id = entry.config.route_id;
    status.config_file = entry.file.filename().string();
    status.config_digest = config_digest(entry.config);
    status.log_file = entry.config.route_id + ".jsonl";
    try {
      EpisodeResult result;
      if (replay) {
        const fs::path source = fs::is_directory(replay_source)
                                    ? replay_source / (entry.config.route_id + ".jsonl")
                                    : replay_source;
        const TrajectoryLog prior = parse_jsonl(read_file(source));
        if (prior.meta.route_id != entry.config.route_id) {
          throw ValidationError(fmt::format("replay log '{}' belongs to route '{}'", source.string(),
                                            prior.meta.route_id));
        }
        if (prior.meta.config_digest != status.config_digest) {
          throw ConfigMismatch(fmt::format("replay log '{}' was recorded against a different config",
                                           source.string()));
        }
        result = replay_episode(entry.config, prior, options);
      } else {
        auto policy = make_policy(request.policy, request.expert);
        result = run_episode(entry.config, *policy, options);
      }
      write_file(request.out_dir / status.log_file, to_jsonl(result.log));
      status.status = "ok";
      status.termination = std::string(to_string(result.termination));
    } catch (const EpisodeAborted& e) {
      status.status = "aborted";
      status.message = e.what();
      try {
        write_file(request.out_dir / status.log_file, to_jsonl(e.partial()));
      } catch (const std::exception&) {
      }
    } catch (const std::exception& e) {
      status.status = "error";
      status.message = e.what();
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(request.jobs, 1)), 1, std::max<std::size_t>(suite.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < suite.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < suite.size(); i = next++) run_one(i);
      });
    }
  }
  write_file(request.out_dir / "manifest.json", manifest_json(manifest));
  return manifest;
}

ScoreResult cmd_score(const ScoreRequest& request) {
  validate(request.metric);
  const std::vector<SuiteEntry> suite = load_suite(request.suite_dir);
  std::vector<std::string> missing;
  std::vector<std::pair<const SuiteEntry*, TrajectoryLog>> logs;
  for (const auto& entry : suite) {
    const fs::path path = request.logs_dir / (entry.config.route_id + ".jsonl");
    if (!fs::exists(path)) {
      missing.push_back(entry.config.route_id);
      continue;
    }
    TrajectoryLog log = parse_jsonl(read_file(path));
    if (log.meta.config_digest != config_digest(entry.config)) {
      throw ConfigMismatch(fmt::format("log for '{}' was recorded against config {} but the suite has {}",
                                       entry.config.route_id, log.meta.config_digest,
                                       config_digest(entry.config)));
    }
    logs.emplace_back(&entry, std::move(log));
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw MissingLog(fmt::format("{} route(s) have no log in '{}': {}", missing.size(),
                                 request.logs_dir.string(), list));
  }
  if (logs.empty()) throw MissingLog(fmt::format("suite '{}' has no routes", request.suite_dir.string()));

  ScoreResult result;
  result.label = logs.front().second.meta.policy.empty() ? "unknown" : logs.front().second.meta.policy;
  std::vector<std::pair<Difficulty, ScoreReport>> reports;
  for (const auto& [entry, log] : logs) {
    RouteScore rs{entry->config.route_id, entry->config.difficulty,
                  score_episode(log, entry->config, request.metric)};
    reports.emplace_back(rs.difficulty, rs.report);
    result.routes.push_back(std::move(rs));
  }
  result.rollup = aggregate(reports);
  result.csv = rollup_csv(result.rollup, result.label);

  ordered_json j;
  j["policy"] = result.label;
  j["alpha"] = request.metric.alpha;
  j["epsilon"] = request.metric.epsilon;
  j["routes"] = ordered_json::array();
  for (const auto& r : result.routes) j["routes"].push_back(to_json(r));
  j["rollup"]["A"] = to_json(result.rollup.all);
  j["rollup"]["E"] = to_json(result.rollup.easy);
  j["rollup"]["M"] = to_json(result.rollup.medium);
  j["rollup"]["H"] = to_json(result.rollup.hard);
  result.json = j.dump(2) + "\n";

  if (request.out_json) write_file(*request.out_json, result.json);
  if (request.out_csv) write_file(*request.out_csv, result.csv);
  return result;
}

std::string cmd_annotate(const AnnotateRequest& request) {
  const std::string text = read_file(request.input);
  std::vector<double> speeds;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    for (const auto& f : parse_jsonl(text).frames) speeds.push_back(f.speed);
  } else {
    speeds = parse_speed_csv(text);
  }
  AnnotationParams params = preset(request.preset);
  params.seed = request.seed;
  const std::string csv = annotation_csv(virtual_target_speed(speeds, params));
  if (request.out_csv) write_file(*request.out_csv, csv);
  return csv;
}

void cmd_plot(const PlotRequest& request) {
  const TrajectoryLog log = parse_jsonl(read_file(request.log));
  const ScenarioConfig cfg = parse_config(read_file(request.config));
  const Route route = Route::build(cfg.waypoints);
  const SpeedPlan plan = SpeedPlan::build(route, cfg.speed_segments, cfg.default_speed);
  PlotOptions options;
  options.title = fmt::format("{} ({})", cfg.route_id, log.meta.policy);
  write_file(request.out_svg, speed_profile_svg(log, route, plan, options));
}

}  // namespace speedbench
