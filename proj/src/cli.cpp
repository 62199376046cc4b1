#include "mlcheck/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "mlcheck/bench.hpp"
#include "mlcheck/error.hpp"
#include "mlcheck/property_file.hpp"
#include "mlcheck/report.hpp"

namespace mlcheck {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::size_t> parse_layout(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || std::stoul(item) == 0) {
      throw Error("bad hidden layer layout '" + text + "'");
    }
    out.push_back(std::stoul(item));
  }
  if (out.empty()) throw Error("bad hidden layer layout '" + text + "'");
  return out;
}

/// Rows of feature values; a leading non-numeric line is taken as a header.
std::vector<Instance> load_bound_data(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::stringstream in(read_file(path, "bound data"));
  std::vector<Instance> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    Instance x;
    std::stringstream fields(line);
    std::string field;
    try {
      while (std::getline(fields, field, ',')) x.values.push_back(parse_rational(trim(field)));
    } catch (const Error&) {
      if (rows.empty() && lineno == 1) continue;
      throw Error("bound data line " + std::to_string(lineno) + ": not a number");
    }
    if (x.values.size() != schema.f_size()) {
      throw Error("bound data line " + std::to_string(lineno) + ": expected " + std::to_string(schema.f_size()) +
                  " values");
    }
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw Error("bound data file has no rows");
  return rows;
}

std::string failure_hint(const std::string& message) {
  if (message.find("solver") != std::string::npos) {
    return "hint: install z3 or point --solver / MLCHECK_SOLVER at an SMT-LIB 2 solver reading stdin";
  }
  return {};
}

struct RunOptions {
  std::string schema;
  std::string property;
  std::string mut;
  std::string wbm = "dt";
  std::string tester = "engine";
  bool multi = false;
  std::size_t max_samples = 1000;
  bool bound_cex = false;
  std::string bound_data;
  std::uint64_t seed = 0;
  std::size_t repeat = 1;
  std::string out;
  std::string report;
  std::string summary;
  std::string solver = default_solver_command();
  double solver_timeout = 30;
  double mut_timeout = 10;
  std::string dump_smt;
  bool fail_on_cex = false;
  bool timing = false;
  std::size_t initial_train_size = 200;
  std::size_t retrain_trigger = 5;
  std::size_t art_pool = 10;
  std::string nn_hidden = "10,10";
  std::size_t nn_epochs = 300;
  std::size_t dt_max_depth = 8;
  std::string config;
};

struct BenchCliOptions {
  std::string manifest;
  std::string format = "md";
  std::size_t jobs = 1;
  std::string solver = default_solver_command();
  double solver_timeout = 30;
  std::string out;
  std::string report;
  bool timing = false;
};

std::chrono::milliseconds to_ms(double seconds) {
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000));
}

int do_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  DatasetSchema schema = load_schema(o.schema);
  PropertySpec spec = load_property(o.property, schema, std::filesystem::current_path());

  EngineConfig cfg;
  cfg.wbm = o.wbm == "nn" ? WhiteBox::nn : WhiteBox::dt;
  cfg.multi = o.multi;
  cfg.max_samples = o.max_samples;
  cfg.bound_cex = o.bound_cex || !o.bound_data.empty();
  if (!o.bound_data.empty()) cfg.bound_data = load_bound_data(o.bound_data, schema);
  cfg.initial_train_size = o.initial_train_size;
  cfg.retrain_trigger = o.retrain_trigger;
  cfg.solver.command = o.solver;
  cfg.solver.timeout = to_ms(o.solver_timeout);
  cfg.train.mlp.hidden = parse_layout(o.nn_hidden);
  cfg.train.mlp.epochs = o.nn_epochs;
  cfg.train.dt.max_depth = o.dt_max_depth;
  if (!o.dump_smt.empty()) cfg.dump_smt = o.dump_smt;
  if (o.max_samples == 0 || o.initial_train_size == 0 || o.retrain_trigger == 0 || o.art_pool == 0 ||
      o.repeat == 0) {
    throw Error("counts must be positive");
  }
  const std::string tester = o.tester == "engine" ? "engine-" + o.wbm : o.tester;

  ModelUnderTest mut = load_model(o.mut, schema, std::filesystem::current_path(), to_ms(o.mut_timeout));

  std::ofstream suite_file;
  if (!o.out.empty()) {
    suite_file.open(o.out);
    if (!suite_file) throw Error("cannot write '" + o.out + "'");
  }
  std::vector<RunRecord> records;
  std::size_t violations = 0;
  for (std::size_t k = 0; k < o.repeat; ++k) {
    cfg.seed = o.seed + k;
    TestSuite suite = run_tester(tester, mut, spec, schema, cfg, o.art_pool);
    violations += suite.counterexamples.size();
    if (suite_file.is_open()) write_suite_jsonl(suite, suite_file, o.timing);
    records.push_back(make_record(suite, o.mut));
  }

  std::ostringstream summary;
  write_summary(records, summary, o.timing);
  out << summary.str();
  if (!o.summary.empty()) {
    std::ofstream s(o.summary);
    if (!s) throw Error("cannot write '" + o.summary + "'");
    s << summary.str();
  }
  if (!o.report.empty()) {
    std::ofstream r(o.report);
    if (!r) throw Error("cannot write '" + o.report + "'");
    write_report_csv(records, r, o.timing);
  }
  for (const auto& r : records) {
    if (r.error) {
      err << "mlcheck: " << *r.error << "\n";
      auto hint = failure_hint(*r.error);
      if (!hint.empty()) err << hint << "\n";
      return kExitFailure;
    }
  }
  if (o.fail_on_cex && violations > 0) return kExitViolations;
  return kExitOk;
}

int do_bench(const BenchCliOptions& o, std::ostream& out) {
  BenchManifest manifest = load_manifest(o.manifest);
  BenchOptions options;
  options.solver.command = o.solver;
  options.solver.timeout = to_ms(o.solver_timeout);
  options.jobs = o.jobs == 0 ? 1 : o.jobs;
  auto cells = run_bench(manifest, options);
  std::ostringstream table;
  write_bench_table(cells, manifest, o.format == "csv" ? TableFormat::csv : TableFormat::markdown, table);
  if (o.out.empty()) {
    out << table.str();
  } else {
    std::ofstream f(o.out);
    if (!f) throw Error("cannot write '" + o.out + "'");
    f << table.str();
  }
  if (!o.report.empty()) {
    std::vector<RunRecord> all;
    for (const auto& c : cells) all.insert(all.end(), c.runs.begin(), c.runs.end());
    std::ofstream r(o.report);
    if (!r) throw Error("cannot write '" + o.report + "'");
    write_report_csv(all, r, o.timing);
  }
  return kExitOk;
}

}  // namespace

std::vector<std::string> config_to_args(const std::string& text) {
  std::vector<std::string> args;
  std::stringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "config") throw Error("config line " + std::to_string(lineno) + ": bad key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

int cli_main(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Property-driven testing of black-box classifiers"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "generate a test suite for one property and model");
  run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  run->add_option("--schema", ro.schema, "XML data format file")->required();
  run->add_option("--property", ro.property,
                  "fairness:s=<feature>, concept:<formula>, trojan:<json file>, or a property file")
      ->required();
  run->add_option("--mut", ro.mut, "builtin:<json file> or external:<command>")->required();
  run->add_option("--wbm", ro.wbm, "white-box model")->check(CLI::IsMember({"dt", "nn"}));
  run->add_option("--tester", ro.tester)->check(CLI::IsMember({"engine", "random", "art"}));
  run->add_flag("--multi", ro.multi, "collect multiple counterexamples");
  run->add_option("--max-samples", ro.max_samples);
  run->add_flag("--bound-cex", ro.bound_cex, "keep counterexamples within training-data bounds");
  run->add_option("--bound-data", ro.bound_data, "CSV of feature rows to derive bounds from");
  run->add_option("--seed", ro.seed);
  run->add_option("--repeat", ro.repeat, "runs with seeds seed, seed+1, ...");
  run->add_option("--out", ro.out, "suite JSON-lines file");
  run->add_option("--report", ro.report, "per-run CSV report");
  run->add_option("--summary", ro.summary, "copy of the summary");
  run->add_option("--solver", ro.solver, "solver command (env MLCHECK_SOLVER)");
  run->add_option("--solver-timeout", ro.solver_timeout, "seconds per solver call");
  run->add_option("--mut-timeout", ro.mut_timeout, "seconds per external model reply");
  run->add_option("--dump-smt", ro.dump_smt, "write every emitted script to this directory");
  run->add_flag("--fail-on-cex", ro.fail_on_cex, "exit 1 when violations are found");
  run->add_flag("--timing", ro.timing, "include wall time in outputs");
  run->add_option("--initial-train-size", ro.initial_train_size);
  run->add_option("--retrain-trigger", ro.retrain_trigger);
  run->add_option("--art-pool", ro.art_pool);
  run->add_option("--nn-hidden", ro.nn_hidden, "hidden layer sizes, e.g. 10,10");
  run->add_option("--nn-epochs", ro.nn_epochs);
  run->add_option("--dt-max-depth", ro.dt_max_depth);
  run->add_option("--config", ro.config, "key = value file supplying any of these flags");

  BenchCliOptions bo;
  auto* bench = app.add_subcommand("bench", "compare testers over a manifest of tasks");
  bench->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  bench->add_option("--manifest", bo.manifest)->required();
  bench->add_option("--format", bo.format)->check(CLI::IsMember({"md", "csv"}));
  bench->add_option("--jobs", bo.jobs);
  bench->add_option("--solver", bo.solver);
  bench->add_option("--solver-timeout", bo.solver_timeout);
  bench->add_option("--out", bo.out, "table file (default stdout)");
  bench->add_option("--report", bo.report, "per-run CSV report");
  bench->add_flag("--timing", bo.timing);

  std::vector<std::string> args = args_in;
  try {
    // Config values go first so that explicit flags win.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config") path = args[i + 1];
      if (path.empty()) continue;
      auto extra = config_to_args(read_file(path, "config file"));
      auto pos = std::find(args.begin(), args.end(), "run");
      if (pos != args.end()) args.insert(pos + 1, extra.begin(), extra.end());
      break;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].rfind("--config=", 0) == 0) throw Error("use --config <file>");
    }
  } catch (const Error& e) {
    err << "mlcheck: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mlcheck: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (run->parsed()) return do_run(ro, out, err);
    return do_bench(bo, out);
  } catch (const OracleError& e) {
    err << "mlcheck: model failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const SolverError& e) {
    err << "mlcheck: solver failure: " << e.what() << "\n" << failure_hint("solver") << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    err << "mlcheck: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mlcheck: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace mlcheck
