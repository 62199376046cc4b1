#include "mlcheck/bench.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "mlcheck/error.hpp"
#include "mlcheck/property_file.hpp"

namespace mlcheck {

bool is_tester_name(const std::string& name) {
  return name == "engine-dt" || name == "engine-nn" || name == "random" || name == "art";
}

TestSuite run_tester(const std::string& tester, ModelUnderTest& mut, const PropertySpec& spec,
                     const DatasetSchema& schema, EngineConfig cfg, std::size_t art_pool) {
  if (tester == "engine-dt" || tester == "engine-nn") {
    cfg.wbm = tester == "engine-dt" ? WhiteBox::dt : WhiteBox::nn;
    return generate_test_suite(mut, spec, schema, cfg);
  }
  if (tester == "random" || tester == "art") {
    BaselineConfig b;
    b.budget = cfg.max_samples;
    b.kind = tester == "art" ? BaselineKind::art : BaselineKind::random;
    b.art_pool = art_pool;
    b.seed = cfg.seed;
    b.multi = cfg.multi;
    return run_baseline(mut, spec, schema, b);
  }
  throw Error("unknown tester '" + tester + "'");
}

BenchManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  using nlohmann::json;
  BenchManifest m;
  m.base_dir = base_dir;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw Error("manifest must be a JSON object");
    m.seeds = j.value("seeds", std::size_t{20});
    m.base_seed = j.value("base_seed", std::uint64_t{0});
    m.testers = j.value("testers", std::vector<std::string>{"engine-dt", "engine-nn", "random", "art"});
    for (const auto& t : m.testers) {
      if (!is_tester_name(t)) throw Error("unknown tester '" + t + "' in manifest");
    }
    if (j.contains("tasks")) {
      for (const auto& t : j.at("tasks")) {
        BenchTask task;
        task.name = t.at("name").get<std::string>();
        task.schema = t.at("schema").get<std::string>();
        task.property = t.at("property").get<std::string>();
        task.mut = t.at("mut").get<std::string>();
        task.max_samples = t.value("max_samples", std::size_t{1000});
        task.initial_train_size = t.value("initial_train_size", std::size_t{200});
        task.multi = t.value("multi", false);
        if (task.max_samples == 0) throw Error("task '" + task.name + "': max_samples must be positive");
        m.tasks.push_back(std::move(task));
      }
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
  if (m.tasks.empty()) throw Error("manifest lists no tasks");
  if (m.testers.empty()) throw Error("manifest lists no testers");
  if (m.seeds == 0) throw Error("manifest seeds must be positive");
  return m;
}

BenchManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

namespace {

BenchCell run_cell(const BenchManifest& m, const BenchTask& task, const std::string& tester,
                   const BenchOptions& options) {
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : m.base_dir / p; };
  DatasetSchema schema = load_schema(resolve(task.schema));
  PropertySpec spec = load_property(task.property, schema, m.base_dir);
  ModelUnderTest mut = load_model(task.mut, schema, m.base_dir);
  BenchCell cell;
  cell.task = task.name;
  cell.tester = tester;
  for (std::size_t k = 0; k < m.seeds; ++k) {
    EngineConfig cfg;
    cfg.max_samples = task.max_samples;
    cfg.multi = task.multi;
    cfg.initial_train_size = task.initial_train_size;
    cfg.retrain_trigger = options.retrain_trigger;
    cfg.seed = m.base_seed + k;
    cfg.solver = options.solver;
    cfg.train = options.train;
    TestSuite suite = run_tester(tester, mut, spec, schema, cfg, options.art_pool);
    cell.runs.push_back(make_record(suite, task.mut));
  }
  cell.summary = aggregate(cell.runs);
  return cell;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<BenchCell> run_bench(const BenchManifest& manifest, const BenchOptions& options) {
  struct Job {
    const BenchTask* task;
    std::string tester;
  };
  std::vector<Job> jobs;
  for (const auto& t : manifest.tasks) {
    for (const auto& tester : manifest.testers) jobs.push_back({&t, tester});
  }
  std::vector<BenchCell> cells(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        cells[i] = run_cell(manifest, *jobs[i].task, jobs[i].tester, options);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return cells;
}

void write_bench_table(const std::vector<BenchCell>& cells, const BenchManifest& manifest, TableFormat format,
                       std::ostream& out) {
  auto find = [&](const std::string& task, const std::string& tester) -> const BenchCell& {
    for (const auto& c : cells) {
      if (c.task == task && c.tester == tester) return c;
    }
    throw Error("missing bench cell " + task + "/" + tester);
  };
  if (format == TableFormat::csv) {
    out << "task,tester,runs,probability,suite_mean,suite_sem,queries_mean,errors\n";
    for (const auto& t : manifest.tasks) {
      for (const auto& tester : manifest.testers) {
        const auto& s = find(t.name, tester).summary;
        out << t.name << ',' << tester << ',' << s.runs << ',' << fixed(s.probability, 2) << ','
            << fixed(s.suite_size.mean, 2) << ',' << fixed(s.suite_size.sem, 2) << ',' << fixed(s.queries.mean, 1)
            << ',' << s.errors << '\n';
      }
    }
    return;
  }
  out << "| task |";
  for (const auto& tester : manifest.testers) out << ' ' << tester << " |";
  out << "\n|---|";
  for (std::size_t k = 0; k < manifest.testers.size(); ++k) out << "---|";
  out << '\n';
  for (const auto& t : manifest.tasks) {
    out << "| " << t.name << " |";
    for (const auto& tester : manifest.testers) {
      const auto& s = find(t.name, tester).summary;
      out << ' ' << fixed(s.probability, 2) << " (" << fixed(s.suite_size.mean, 1) << " ± "
          << fixed(s.suite_size.sem, 1) << ')';
      if (s.errors) out << " [" << s.errors << " errors]";
      out << " |";
    }
    out << '\n';
  }
  out << "\ncells: detection probability over " << manifest.seeds << " seeds (mean ± SEM suite size)\n";
}

}  // namespace mlcheck
