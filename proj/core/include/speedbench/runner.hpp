#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speedbench/annotation.hpp"
#include "speedbench/episode.hpp"
#include "speedbench/expert_policy.hpp"
#include "speedbench/metrics.hpp"
#include "speedbench/scenario_config.hpp"
#include "speedbench/suite_generator.hpp"

namespace speedbench {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";

/// Reads a whole file; throws IoError.
std::string read_file(const fs::path& path);
/// Writes a whole file, creating parent directories; throws IoError.
void write_file(const fs::path& path, std::string_view contents);

struct SuiteEntry {
  fs::path file;
  ScenarioConfig config;
};

/// Routes of a suite directory, in index.json order when present, otherwise
/// sorted *.xml files.
std::vector<SuiteEntry> load_suite(const fs::path& suite_dir);

struct GenerateRequest {
  std::optional<Difficulty> difficulty;  ///< nullopt generates all three
  int count = 16;
  std::uint64_t seed = 0;
  fs::path out_dir;
  SuiteOptions options;
};

/// Writes `<route_id>.xml` per config plus index.json; returns written
/// config paths.
std::vector<fs::path> cmd_generate(const GenerateRequest& request);

/// Builds a policy from an id: expert, inert, lane_keeping, or fixed:<m/s>.
/// Throws ValidationError for anything else.
std::unique_ptr<Policy> make_policy(const std::string& id, const ExpertParams& expert = {});

struct RouteStatus {
  std::string route_id;
  std::string config_file;
  std::string config_digest;
  std::string log_file;
  std::string status;  ///< ok | aborted | error
  std::string termination;
  std::string message;
};

struct RunManifest {
  std::string suite;
  std::string policy;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string tool_version = kToolVersion;
  std::string suite_digest;
  std::vector<RouteStatus> routes;

  bool all_ok() const;
};

struct RunRequest {
  fs::path suite_dir;
  /// expert | inert | lane_keeping | fixed:<v> | replay:<log file or dir>
  std::string policy = "expert";
  fs::path out_dir;
  int jobs = 1;
  std::uint64_t seed = 0;
  ExpertParams expert;
  std::optional<double> time_limit;
};

/// Runs every route of the suite, writing `<route_id>.jsonl` logs and
/// manifest.json. Per-route failures are recorded and the run continues.
RunManifest cmd_run(const RunRequest& request);

struct ScoreRequest {
  fs::path logs_dir;
  fs::path suite_dir;
  MetricConfig metric;
  std::optional<fs::path> out_json;
  std::optional<fs::path> out_csv;
};

struct RouteScore {
  std::string route_id;
  Difficulty difficulty = Difficulty::Easy;
  ScoreReport report;
};

struct ScoreResult {
  std::string label;
  std::vector<RouteScore> routes;
  Rollup rollup;
  std::string json;
  std::string csv;
};

/// Scores each route's log against its config. Throws MissingLog listing
/// every route without a log, and ConfigMismatch when a log's config digest
/// differs from the suite file.
ScoreResult cmd_score(const ScoreRequest& request);

struct AnnotateRequest {
  fs::path input;  ///< trajectory JSONL or CSV with a `v` column
  AnnotationPreset preset = AnnotationPreset::Long;
  std::uint64_t seed = 0;
  std::optional<fs::path> out_csv;
};

/// Returns the CSV text (also written when out_csv is set).
std::string cmd_annotate(const AnnotateRequest& request);

struct PlotRequest {
  fs::path log;
  fs::path config;
  fs::path out_svg;
};

void cmd_plot(const PlotRequest& request);

}  // namespace speedbench
