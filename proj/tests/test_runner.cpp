#include <gtest/gtest.h>

#include <cstdio>
#include <nlohmann/json.hpp>

#include "speedbench/errors.hpp"
#include "speedbench/runner.hpp"
#include "temp_dir.hpp"

using namespace speedbench;

namespace {

#ifdef SPEEDBENCH_TOOL
struct Shell {
  int status;
  std::string out;
};

Shell sh(const std::string& args) {
  const std::string cmd = std::string(SPEEDBENCH_TOOL) + " " + args + " 2>&1";
  Shell r{0, {}};
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, {}};
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }
#endif

void generate(const fs::path& dir, std::optional<Difficulty> d, int count, std::uint64_t seed) {
  GenerateRequest req;
  req.difficulty = d;
  req.count = count;
  req.seed = seed;
  req.out_dir = dir;
  cmd_generate(req);
}

}  // namespace

TEST(Generate, WritesConfigsAndIndex) {
  TempDir tmp("gen");
  GenerateRequest req{Difficulty::Easy, 16, 1, tmp.path(), {}};
  const auto files = cmd_generate(req);
  EXPECT_EQ(files.size(), 16u);
  EXPECT_TRUE(fs::exists(tmp / "index.json"));
  EXPECT_EQ(load_suite(tmp.path()).size(), 16u);
}

TEST(Generate, ByteIdenticalRerun) {
  TempDir a("gen_a");
  TempDir b("gen_b");
  generate(a.path(), Difficulty::Hard, 5, 42);
  generate(b.path(), Difficulty::Hard, 5, 42);
  for (const auto& entry : fs::directory_iterator(a.path())) {
    EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename().string()));
  }
}

TEST(Generate, MediumHasOneScenarioElement) {
  TempDir tmp("gen_m");
  generate(tmp.path(), Difficulty::Medium, 4, 2);
  for (const auto& e : load_suite(tmp.path())) {
    const std::string doc = read_file(e.file);
    std::size_t count = 0;
    for (auto pos = doc.find("<scenario"); pos != std::string::npos; pos = doc.find("<scenario", pos + 1)) ++count;
    EXPECT_EQ(count, 1u);
  }
}

TEST(Generate, UnwritableDirectory) {
  GenerateRequest req{Difficulty::Easy, 1, 1, "/proc/definitely/not/writable", {}};
  EXPECT_THROW(cmd_generate(req), IoError);
}

TEST(MakePolicy, KnownAndUnknownIds) {
  EXPECT_EQ(make_policy("expert")->id(), "expert");
  EXPECT_EQ(make_policy("inert")->id(), "inert");
  EXPECT_EQ(make_policy("lane_keeping")->id(), "lane_keeping");
  EXPECT_EQ(make_policy("fixed:8")->id(), "fixed_speed:8");
  EXPECT_THROW(make_policy("fixed:abc"), ValidationError);
  EXPECT_THROW(make_policy("genius"), ValidationError);
}

TEST(Run, ExpertEasySuiteCompletes) {
  TempDir tmp("run_e");
  generate(tmp / "suite", Difficulty::Easy, 16, 1);
  RunRequest req;
  req.suite_dir = tmp / "suite";
  req.out_dir = tmp / "logs";
  req.jobs = 2;
  const RunManifest m = cmd_run(req);
  EXPECT_TRUE(m.all_ok());
  EXPECT_EQ(m.routes.size(), 16u);
  ScoreRequest sr;
  sr.logs_dir = tmp / "logs";
  sr.suite_dir = tmp / "suite";
  const auto scores = cmd_score(sr);
  for (const auto& r : scores.routes) EXPECT_EQ(r.report.route_completion, 100.0) << r.route_id;
  const auto manifest = nlohmann::json::parse(read_file(tmp / "logs" / "manifest.json"));
  EXPECT_EQ(manifest["tool_version"], kToolVersion);
  EXPECT_EQ(manifest["routes"].size(), 16u);
  EXPECT_EQ(manifest["routes"][0]["status"], "ok");
}

TEST(Run, InertCompletesNothing) {
  TempDir tmp("run_i");
  generate(tmp / "suite", Difficulty::Easy, 2, 1);
  RunRequest req{tmp / "suite", "inert", tmp / "logs"};
  EXPECT_TRUE(cmd_run(req).all_ok());
  const auto scores = cmd_score({tmp / "logs", tmp / "suite"});
  for (const auto& r : scores.routes) {
    EXPECT_EQ(r.report.route_completion, 0.0);
    EXPECT_EQ(r.report.speed_adherence, 0.0);
  }
}

TEST(Run, ParallelMatchesSerial) {
  TempDir tmp("run_p");
  generate(tmp / "suite", Difficulty::Hard, 4, 8);
  RunRequest serial{tmp / "suite", "expert", tmp / "a"};
  RunRequest parallel{tmp / "suite", "expert", tmp / "b", 4};
  cmd_run(serial);
  cmd_run(parallel);
  for (const auto& e : load_suite(tmp / "suite")) {
    const std::string name = e.config.route_id + ".jsonl";
    EXPECT_EQ(read_file(tmp / "a" / name), read_file(tmp / "b" / name));
  }
}

TEST(Run, ReplayScoresIdentically) {
  TempDir tmp("run_r");
  generate(tmp / "suite", std::nullopt, 2, 5);
  cmd_run({tmp / "suite", "expert", tmp / "orig"});
  RunRequest replay{tmp / "suite", "replay:" + (tmp / "orig").string(), tmp / "again"};
  EXPECT_TRUE(cmd_run(replay).all_ok());
  const auto a = cmd_score({tmp / "orig", tmp / "suite"});
  const auto b = cmd_score({tmp / "again", tmp / "suite"});
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.json, b.json);
}

TEST(Run, BadRouteIsRecordedAndRunContinues) {
  TempDir tmp("run_bad");
  generate(tmp / "suite", Difficulty::Easy, 2, 1);
  // Replay from a directory holding only one of the two logs.
  cmd_run({tmp / "suite", "expert", tmp / "orig"});
  fs::remove(tmp / "orig" / "easy_01.jsonl");
  const auto m = cmd_run({tmp / "suite", "replay:" + (tmp / "orig").string(), tmp / "again"});
  EXPECT_FALSE(m.all_ok());
  EXPECT_EQ(m.routes[0].status, "ok");
  EXPECT_EQ(m.routes[1].status, "error");
}

TEST(Score, MissingLogsListed) {
  TempDir tmp("score_m");
  generate(tmp / "suite", Difficulty::Easy, 3, 1);
  fs::create_directories(tmp / "empty");
  try {
    cmd_score({tmp / "empty", tmp / "suite"});
    FAIL() << "expected MissingLog";
  } catch (const MissingLog& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("easy_00"), std::string::npos);
    EXPECT_NE(msg.find("easy_02"), std::string::npos);
  }
}

TEST(Score, DigestMismatch) {
  TempDir tmp("score_d");
  generate(tmp / "suite", Difficulty::Easy, 1, 1);
  cmd_run({tmp / "suite", "expert", tmp / "logs"});
  generate(tmp / "suite", Difficulty::Easy, 1, 2);  // same ids, new content
  EXPECT_THROW(cmd_score({tmp / "logs", tmp / "suite"}), ConfigMismatch);
}

TEST(Score, AlphaMonotone) {
  TempDir tmp("score_a");
  generate(tmp / "suite", Difficulty::Medium, 2, 1);
  cmd_run({tmp / "suite", "fixed:7", tmp / "logs"});
  ScoreRequest r3{tmp / "logs", tmp / "suite"};
  ScoreRequest r6 = r3;
  r6.metric.alpha = 6.0;
  const auto a = cmd_score(r3);
  const auto b = cmd_score(r6);
  for (std::size_t i = 0; i < a.routes.size(); ++i) {
    EXPECT_LT(b.routes[i].report.speed_adherence, a.routes[i].report.speed_adherence);
  }
}

TEST(Annotate, ConstantLogIsUnchanged) {
  TempDir tmp("ann");
  write_file(tmp / "v.csv", "v\n4\n4\n4\n4\n");
  const std::string csv = cmd_annotate({tmp / "v.csv"});
  EXPECT_EQ(csv, "frame,v,v_tend,v_virt\n0,4.000000,4.000000,4.000000\n1,4.000000,4.000000,4.000000\n"
                 "2,4.000000,4.000000,4.000000\n3,4.000000,4.000000,4.000000\n");
  write_file(tmp / "one.csv", "v\n4\n");
  EXPECT_THROW(cmd_annotate({tmp / "one.csv"}), TraceTooShort);
}

TEST(Annotate, LongExtendsMoreThanShortOnAcceleration) {
  TempDir tmp("ann_ls");
  std::string csv = "v\n";
  for (int i = 0; i < 100; ++i) csv += std::to_string(0.3 * i) + "\n";
  write_file(tmp / "acc.csv", csv);
  auto mean_ext = [&](AnnotationPreset p) {
    const auto out = cmd_annotate({tmp / "acc.csv", p, 3});
    std::istringstream in(out);
    std::string line;
    std::getline(in, line);
    double sum = 0.0;
    int n = 0;
    while (std::getline(in, line)) {
      double f, v, tend, virt;
      std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &f, &v, &tend, &virt);
      sum += std::abs(virt - tend);
      ++n;
    }
    return sum / n;
  };
  EXPECT_GE(mean_ext(AnnotationPreset::Long), mean_ext(AnnotationPreset::Short));
}

#ifdef SPEEDBENCH_TOOL
TEST(Cli, EndToEnd) {
  TempDir tmp("cli");
  auto r = sh("generate medium --count 2 --seed 3 --out " + q(tmp / "suite"));
  ASSERT_EQ(r.status, 0) << r.out;
  r = sh("run " + q(tmp / "suite") + " --jobs 2 --out " + q(tmp / "logs"));
  ASSERT_EQ(r.status, 0) << r.out;
  r = sh("score " + q(tmp / "logs") + " " + q(tmp / "suite") + " --out " + q(tmp / "s.json") + " --csv " +
         q(tmp / "s.csv"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(read_file(tmp / "s.csv").rfind("policy,speed_adherence_A", 0), 0u);
  r = sh("plot " + q(tmp / "logs" / "medium_00.jsonl") + " " + q(tmp / "suite" / "medium_00.xml") + " --out " +
         q(tmp / "p.svg"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(read_file(tmp / "p.svg").find("<polyline"), std::string::npos);
  r = sh("annotate " + q(tmp / "logs" / "medium_00.jsonl") + " --preset short --seed 4");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("frame,v,v_tend,v_virt", 0), 0u);
}

TEST(Cli, ErrorsExitNonzero) {
  TempDir tmp("cli_err");
  EXPECT_NE(sh("score " + q(tmp / "nothing") + " " + q(tmp / "nowhere")).status, 0);
  EXPECT_NE(sh("run " + q(tmp / "nowhere") + " --out " + q(tmp / "x")).status, 0);
  EXPECT_NE(sh("generate --count 0 --out " + q(tmp / "g")).status, 0);
  EXPECT_NE(sh("bogus").status, 0);
  ASSERT_EQ(sh("generate easy --count 1 --out " + q(tmp / "suite")).status, 0);
  EXPECT_NE(sh("run " + q(tmp / "suite") + " --policy replay:" + q(tmp / "none") + " --out " + q(tmp / "l")).status,
            0);
}

TEST(Cli, SeedFromEnvironment) {
  TempDir tmp("cli_env");
  ASSERT_EQ(sh("generate easy --count 1 --seed 77 --out " + q(tmp / "a")).status, 0);
  ASSERT_EQ(::setenv("SPEEDBENCH_SEED", "77", 1), 0);
  const auto r = sh("generate easy --count 1 --out " + q(tmp / "b"));
  ::unsetenv("SPEEDBENCH_SEED");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(read_file(tmp / "a" / "easy_00.xml"), read_file(tmp / "b" / "easy_00.xml"));
}
#endif
