#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mlcheck/engine.hpp"

namespace mlcheck {

struct RunRecord {
  std::string mut;
  std::string property;
  std::string tester;
  std::uint64_t seed = 0;
  bool found = false;
  std::size_t suite_size = 0;
  std::size_t queries = 0;
  std::size_t solver_calls = 0;
  double wall_seconds = 0;
  std::optional<std::string> error;
};

RunRecord make_record(const TestSuite& suite, const std::string& mut);

struct MeanSem {
  double mean = 0;
  /// Sample standard deviation over sqrt(runs); 0 for fewer than two runs.
  double sem = 0;
};

MeanSem mean_sem(const std::vector<double>& values);

struct Aggregate {
  std::size_t runs = 0;
  std::size_t errors = 0;
  /// Fraction of runs that found at least one counterexample.
  double probability = 0;
  MeanSem suite_size;
  MeanSem queries;
  MeanSem solver_calls;
  MeanSem wall_seconds;
};

Aggregate aggregate(const std::vector<RunRecord>& runs);

/// Per-run rows followed by nothing else; wall time only when requested.
void write_report_csv(const std::vector<RunRecord>& runs, std::ostream& out, bool include_timing = false);
void write_summary(const std::vector<RunRecord>& runs, std::ostream& out, bool include_timing = false);

}  // namespace mlcheck
