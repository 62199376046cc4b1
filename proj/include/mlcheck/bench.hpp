#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mlcheck/baseline.hpp"
#include "mlcheck/engine.hpp"
#include "mlcheck/report.hpp"

namespace mlcheck {

/// Testers: engine-dt, engine-nn, random, art.
bool is_tester_name(const std::string& name);

/// Runs one tester. Baselines get max_samples as their budget.
TestSuite run_tester(const std::string& tester, ModelUnderTest& mut, const PropertySpec& spec,
                     const DatasetSchema& schema, EngineConfig cfg, std::size_t art_pool = 10);

struct BenchTask {
  std::string name;
  std::filesystem::path schema;
  std::string property;
  std::string mut;
  std::size_t max_samples = 1000;
  std::size_t initial_train_size = 200;
  bool multi = false;
};

/// JSON manifest:
///   {"seeds": 20, "base_seed": 0, "testers": [...],
///    "tasks": [{"name", "schema", "property", "mut", "max_samples", "multi",
///               "initial_train_size"}]}
/// Relative paths resolve against the manifest's directory.
struct BenchManifest {
  std::vector<BenchTask> tasks;
  std::vector<std::string> testers;
  std::size_t seeds = 20;
  std::uint64_t base_seed = 0;
  std::filesystem::path base_dir;
};

BenchManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});
BenchManifest load_manifest(const std::filesystem::path& path);

struct BenchOptions {
  SolverConfig solver;
  TrainParams train;
  std::size_t retrain_trigger = 5;
  std::size_t art_pool = 10;
  std::size_t jobs = 1;
};

struct BenchCell {
  std::string task;
  std::string tester;
  std::vector<RunRecord> runs;
  Aggregate summary;
};

/// Cells in task-major, tester-minor order regardless of jobs.
std::vector<BenchCell> run_bench(const BenchManifest& manifest, const BenchOptions& options);

enum class TableFormat { markdown, csv };
/// Detection probability with mean +- SEM of suite sizes per cell.
void write_bench_table(const std::vector<BenchCell>& cells, const BenchManifest& manifest, TableFormat format,
                       std::ostream& out);

}  // namespace mlcheck
