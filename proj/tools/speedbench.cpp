#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "speedbench/errors.hpp"
#include "speedbench/runner.hpp"

namespace sb = speedbench;

namespace {

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPEEDBENCH_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto value = std::stoull(env, &used);
      if (used == std::string_view(env).size()) return value;
    } catch (const std::exception&) {
    }
    throw sb::ValidationError(fmt::format("SPEEDBENCH_SEED='{}' is not an unsigned integer", env));
  }
  return 0;
}

sb::Softening parse_softening(const std::string& name) {
  if (name == "off") return sb::Softening::Off;
  if (name == "full") return sb::Softening::Full;
  if (name == "partial") return sb::Softening::Partial;
  throw sb::ValidationError(fmt::format("unknown softening '{}' (off, full, partial)", name));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speed-conditioned driving benchmark"};
  app.set_version_flag("--version", std::string(sb::kToolVersion));
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out;

  // generate
  auto* gen = app.add_subcommand("generate", "Write a procedurally generated route suite");
  std::string gen_difficulty = "all";
  int gen_count = 16;
  gen->add_option("difficulty", gen_difficulty, "easy, medium, hard or all")->capture_default_str();
  gen->add_option("--count,-n", gen_count, "Routes per difficulty")->capture_default_str();
  gen->add_option("--seed", seed, "Suite seed (default: $SPEEDBENCH_SEED or 0)");
  gen->add_option("--out,-o", out, "Output directory")->required();

  // run
  auto* run = app.add_subcommand("run", "Drive every route of a suite and write trajectory logs");
  std::string run_suite;
  std::string run_policy = "expert";
  int jobs = 1;
  std::optional<double> time_limit;
  std::string expert_file;
  run->add_option("suite", run_suite, "Suite directory")->required();
  run->add_option("--policy,-p", run_policy,
                  "expert | inert | lane_keeping | fixed:<m/s> | replay:<log file or dir>")
      ->capture_default_str();
  run->add_option("--jobs,-j", jobs, "Routes simulated in parallel")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Run seed recorded in the manifest");
  run->add_option("--time-limit", time_limit, "Override the per-episode time limit, s");
  run->add_option("--expert-params", expert_file, "key = value file overriding expert constants");
  run->add_option("--out,-o", out, "Log directory")->required();

  // score
  auto* score = app.add_subcommand("score", "Score logs against their suite");
  std::string logs_dir;
  std::string score_suite;
  double alpha = 3.0;
  double epsilon = 0.1;
  std::string softening = "full";
  std::string csv_out;
  score->add_option("logs", logs_dir, "Log directory")->required();
  score->add_option("suite", score_suite, "Suite directory")->required();
  score->add_option("--alpha", alpha, "Penalty strength")->capture_default_str();
  score->add_option("--epsilon", epsilon, "Target-speed floor, m/s")->capture_default_str();
  score->add_option("--softening", softening, "off | full | partial")->capture_default_str();
  score->add_option("--out,-o", out, "Per-route report JSON (default: stdout)");
  score->add_option("--csv", csv_out, "Rollup CSV (default: stdout)");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Re-annotate a speed trace with virtual target speeds");
  std::string trace;
  std::string preset_name = "long";
  annotate->add_option("input", trace, "Trajectory JSONL or CSV with a v column")->required();
  annotate->add_option("--preset", preset_name, "long | short")->capture_default_str();
  annotate->add_option("--seed", seed, "Draw seed (default: $SPEEDBENCH_SEED or 0)");
  annotate->add_option("--out,-o", out, "Output CSV (default: stdout)");

  // plot
  auto* plot = app.add_subcommand("plot", "Plot actual and target speed against arc length");
  std::string plot_log;
  std::string plot_config;
  plot->add_option("log", plot_log, "Trajectory JSONL")->required();
  plot->add_option("config", plot_config, "Route config XML")->required();
  plot->add_option("--out,-o", out, "Output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      sb::GenerateRequest req;
      if (gen_difficulty != "all") req.difficulty = sb::parse_difficulty(gen_difficulty);
      req.count = gen_count;
      req.seed = seed_or_env(seed);
      req.out_dir = out;
      const auto files = sb::cmd_generate(req);
      std::cout << fmt::format("wrote {} configs to {}\n", files.size(), out);
    } else if (*run) {
      sb::RunRequest req;
      req.suite_dir = run_suite;
      req.policy = run_policy;
      req.out_dir = out;
      req.jobs = jobs;
      req.seed = seed_or_env(seed);
      req.time_limit = time_limit;
      if (!expert_file.empty()) req.expert = sb::parse_expert_params(sb::read_file(expert_file));
      const auto manifest = sb::cmd_run(req);
      int failed = 0;
      for (const auto& r : manifest.routes) {
        if (r.status != "ok") {
          ++failed;
          std::cerr << fmt::format("{}: {}: {}\n", r.route_id, r.status, r.message);
        }
      }
      std::cout << fmt::format("{} routes, {} ok, {} failed; logs in {}\n", manifest.routes.size(),
                               manifest.routes.size() - failed, failed, out);
      return manifest.all_ok() ? 0 : 1;
    } else if (*score) {
      sb::ScoreRequest req;
      req.logs_dir = logs_dir;
      req.suite_dir = score_suite;
      req.metric.alpha = alpha;
      req.metric.epsilon = epsilon;
      req.metric.softening = parse_softening(softening);
      if (!out.empty()) req.out_json = out;
      if (!csv_out.empty()) req.out_csv = csv_out;
      const auto result = sb::cmd_score(req);
      if (out.empty()) std::cout << result.json;
      if (csv_out.empty()) std::cout << result.csv;
    } else if (*annotate) {
      sb::AnnotateRequest req;
      req.input = trace;
      req.preset = sb::parse_preset(preset_name);
      req.seed = seed_or_env(seed);
      if (!out.empty()) req.out_csv = out;
      const auto csv = sb::cmd_annotate(req);
      if (out.empty()) std::cout << csv;
    } else if (*plot) {
      sb::cmd_plot({plot_log, plot_config, out});
    }
  } catch (const sb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
