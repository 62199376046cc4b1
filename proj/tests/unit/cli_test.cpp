#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "mlcheck/bench.hpp"
#include "mlcheck/cli.hpp"
#include "mlcheck/error.hpp"
#include "mlcheck/report.hpp"
#include "support.hpp"

using namespace mlcheck;
namespace fs = std::filesystem;

namespace {

const std::string kSamples = SAMPLES_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("mlcheck-test-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> fairness_run(const std::string& mut) {
  return {"run", "--schema", kSamples + "/binary4.xml", "--property", "fairness:s=b", "--mut", "builtin:" + kSamples + "/" + mut,
          "--wbm", "dt", "--max-samples", "100", "--initial-train-size", "50"};
}

}  // namespace

TEST(Report, MeanSem) {
  auto m = mean_sem({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  // independent: sample variance 32/7
  EXPECT_NEAR(m.sem, std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-12);
  EXPECT_EQ(mean_sem({3}).sem, 0);
  EXPECT_EQ(mean_sem({}).mean, 0);
}

TEST(Report, AggregateProbability) {
  std::vector<RunRecord> runs(4);
  runs[0].found = true;
  runs[0].suite_size = 2;
  runs[1].found = true;
  runs[1].suite_size = 1;
  runs[3].error = "boom";
  auto a = aggregate(runs);
  EXPECT_EQ(a.runs, 4u);
  EXPECT_EQ(a.errors, 1u);
  EXPECT_DOUBLE_EQ(a.probability, 0.5);
  EXPECT_DOUBLE_EQ(a.suite_size.mean, 0.75);
}

TEST(Cli, ConfigToArgs) {
  auto args = config_to_args("# c\nwbm = nn\nnn_hidden = \"10,10\"\n\nmulti=true\n");
  EXPECT_EQ(args, (std::vector<std::string>{"--wbm=nn", "--nn-hidden=10,10", "--multi=true"}));
}

TEST(Cli, RunWritesSuiteAndSummary) {
  TempDir dir;
  auto args = fairness_run("unfair_rule.json");
  args.insert(args.end(), {"--out", (dir / "suite.jsonl").string(), "--summary", (dir / "summary.txt").string()});
  auto r = cli(args);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  auto suite = slurp(dir / "suite.jsonl");
  EXPECT_NE(suite.find("\"type\":\"counterexample\""), std::string::npos);
  auto summary = slurp(dir / "summary.txt");
  EXPECT_NE(summary.find("probability:"), std::string::npos);

  args.push_back("--fail-on-cex");
  EXPECT_EQ(cli(args).code, kExitViolations);
  auto clean = fairness_run("constant.json");
  clean.push_back("--fail-on-cex");
  EXPECT_EQ(cli(clean).code, kExitOk);
}

TEST(Cli, RepeatReportHasSem) {
  TempDir dir;
  auto args = fairness_run("unfair_rule.json");
  args.insert(args.end(), {"--repeat", "3", "--report", (dir / "report.csv").string()});
  auto r = cli(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("probability: 1.00"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("suite size:  1.00 +- 0.00"), std::string::npos) << r.out;
  auto csv = slurp(dir / "report.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--schema", kSamples + "/binary4.xml"}).code, kExitUsage);
  auto bad_wbm = fairness_run("unfair_rule.json");
  bad_wbm[8] = "svm";
  EXPECT_EQ(cli(bad_wbm).code, kExitUsage);
  auto missing = fairness_run("nope.json");
  EXPECT_EQ(cli(missing).code, kExitUsage);
  auto bad_prop = fairness_run("unfair_rule.json");
  bad_prop[4] = "fairness:s=zz";
  EXPECT_EQ(cli(bad_prop).code, kExitUsage);
}

TEST(Cli, MissingSolverIsFailure) {
  auto args = fairness_run("unfair_rule.json");
  args.insert(args.end(), {"--solver", "/nonexistent/z3 -in"});
  auto r = cli(args);
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("MLCHECK_SOLVER"), std::string::npos) << r.err;
}

TEST(Cli, BrokenExternalModelIsFailure) {
  std::vector<std::string> args{"run", "--schema", kSamples + "/binary4.xml", "--property", "fairness:s=b",
                                "--mut", std::string("external:") + ECHO_MODEL + " --mode die", "--max-samples", "20",
                                "--initial-train-size", "10"};
  EXPECT_EQ(cli(args).code, kExitFailure);
}

TEST(Cli, ExplicitFlagsOverrideConfig) {
  TempDir dir;
  std::ofstream(dir / "run.cfg") << "# baseline run\ntester = art\nmax_samples = 7\n";
  auto args = fairness_run("unfair_rule.json");
  args.insert(args.begin() + 1, {"--config", (dir / "run.cfg").string()});
  args.insert(args.end(), {"--out", (dir / "a.jsonl").string()});
  ASSERT_EQ(cli(args).code, kExitOk);
  EXPECT_NE(slurp(dir / "a.jsonl").find("\"tester\":\"art\""), std::string::npos);
  args.insert(args.end(), {"--tester", "random", "--out", (dir / "b.jsonl").string()});
  ASSERT_EQ(cli(args).code, kExitOk);
  EXPECT_NE(slurp(dir / "b.jsonl").find("\"tester\":\"random\""), std::string::npos);

  std::ofstream(dir / "bad.cfg") << "wbm = svm\n";
  auto bad = fairness_run("unfair_rule.json");
  bad.insert(bad.begin() + 1, {"--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(cli(bad).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--config", (dir / "missing.cfg").string()}).code, kExitUsage);
}

TEST(Bench, EmptyManifestIsUsageError) {
  EXPECT_THROW(parse_manifest(R"({"seeds": 2, "testers": ["random"], "tasks": []})"), Error);
  TempDir dir;
  std::ofstream(dir / "m.json") << R"({"seeds": 2, "testers": ["random"], "tasks": []})";
  EXPECT_EQ(cli({"bench", "--manifest", (dir / "m.json").string()}).code, kExitUsage);
  EXPECT_THROW(parse_manifest(R"({"testers": ["fuzz"], "tasks": [{"name": "t", "schema": "s", "property": "p", "mut": "m"}]})"),
               Error);
}

TEST(Bench, SingleAlwaysFoundCell) {
  TempDir dir;
  std::ofstream(dir / "m.json") << R"({"seeds": 3, "testers": ["random"], "tasks": [
    {"name": "always", "schema": ")" + kSamples + R"(/binary4.xml", "property": "concept:lab",
     "mut": "builtin:)" + kSamples + R"(/constant.json", "max_samples": 10}]})";
  auto r = cli({"bench", "--manifest", (dir / "m.json").string(), "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("always"), std::string::npos);
  EXPECT_NE(r.out.find("1.00"), std::string::npos) << r.out;
}

TEST(Bench, TableShape) {
  auto manifest = load_manifest(kSamples + "/bench.json");
  manifest.seeds = 2;
  manifest.testers = {"engine-dt", "random", "art"};
  for (auto& t : manifest.tasks) t.initial_train_size = 50;
  BenchOptions opt;
  opt.solver.command = default_solver_command();
  opt.jobs = 2;
  auto cells = run_bench(manifest, opt);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].task, "unfair-b");
  EXPECT_EQ(cells[0].tester, "engine-dt");
  EXPECT_EQ(cells[5].task, "trojan");
  EXPECT_EQ(cells[5].tester, "art");
  for (const auto& c : cells) EXPECT_EQ(c.runs.size(), 2u);
  std::ostringstream md;
  write_bench_table(cells, manifest, TableFormat::markdown, md);
  std::istringstream lines(md.str());
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_GE(rows.size(), 4u);  // header, rule, one row per task
  EXPECT_EQ(rows[2].rfind("| unfair-b |", 0), 0u);
  EXPECT_EQ(rows[3].rfind("| trojan |", 0), 0u);
  EXPECT_NE(rows[0].find("engine-dt"), std::string::npos);
  EXPECT_NE(rows[0].find("art"), std::string::npos);
}
