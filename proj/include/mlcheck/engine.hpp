#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mlcheck/oracle.hpp"
#include "mlcheck/propdsl.hpp"
#include "mlcheck/schema.hpp"
#include "mlcheck/smt.hpp"
#include "mlcheck/surrogate.hpp"

namespace mlcheck {

struct Counterexample {
  /// One entry per instance variable of the property, in order.
  std::vector<Instance> instances;
  std::vector<Prediction> mut_predictions;
  /// Surrogate (solver) class values at discovery; empty for baselines.
  std::vector<Prediction> surrogate_predictions;
  std::size_t iteration = 0;
};

struct SuiteStats {
  std::size_t queries = 0;
  std::size_t solver_calls = 0;
  std::size_t retrains = 0;
  std::size_t rejected = 0;
  /// Budget consumed: candidates examined plus fresh random rows.
  std::size_t samples = 0;
  std::size_t seeded = 0;
  double wall_seconds = 0;
  std::string stop_reason;
  std::optional<std::string> error;
};

struct TestSuite {
  std::string property;
  std::string tester;
  std::uint64_t seed = 0;
  std::vector<std::string> instance_vars;
  std::vector<Counterexample> counterexamples;
  SuiteStats stats;
};

enum class WhiteBox { dt, nn };

struct EngineConfig {
  WhiteBox wbm = WhiteBox::dt;
  bool multi = false;
  std::size_t max_samples = 1000;
  bool bound_cex = false;
  /// Source of bound_cex bounds; the seeded training rows when absent.
  std::optional<std::vector<Instance>> bound_data;
  std::size_t initial_train_size = 200;
  std::size_t retrain_trigger = 5;
  std::uint64_t seed = 0;
  SolverConfig solver;
  TrainParams train;
  /// Every emitted script is written here when set.
  std::optional<std::filesystem::path> dump_smt;
};

struct CandidateCheck {
  bool valid = false;
  std::vector<Prediction> predictions;
};

/// Queries the MUT on each instance and evaluates assume and not assert.
CandidateCheck check_candidate(ModelUnderTest& mut, const PropertySpec& spec, const std::vector<Instance>& instances);

FeatureBounds derive_bounds(const std::vector<Instance>& rows);
FeatureBounds derive_bounds(const LabeledSet& data);

TestSuite generate_test_suite(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                              const EngineConfig& cfg);

/// One JSON line per counterexample, then a stats line. Wall time is left
/// out unless requested so that suite files are reproducible.
void write_suite_jsonl(const TestSuite& suite, std::ostream& out, bool include_timing = false);

}  // namespace mlcheck
