#include "mlcheck/report.hpp"

#include <cmath>
#include <cstdio>

namespace mlcheck {

RunRecord make_record(const TestSuite& suite, const std::string& mut) {
  RunRecord r;
  r.mut = mut;
  r.property = suite.property;
  r.tester = suite.tester;
  r.seed = suite.seed;
  r.found = !suite.counterexamples.empty();
  r.suite_size = suite.counterexamples.size();
  r.queries = suite.stats.queries;
  r.solver_calls = suite.stats.solver_calls;
  r.wall_seconds = suite.stats.wall_seconds;
  r.error = suite.stats.error;
  return r;
}

MeanSem mean_sem(const std::vector<double>& values) {
  MeanSem out;
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  double stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  out.sem = stddev / std::sqrt(static_cast<double>(values.size()));
  return out;
}

Aggregate aggregate(const std::vector<RunRecord>& runs) {
  Aggregate a;
  a.runs = runs.size();
  std::vector<double> sizes, queries, calls, wall;
  std::size_t found = 0;
  for (const auto& r : runs) {
    found += r.found;
    a.errors += r.error.has_value();
    sizes.push_back(static_cast<double>(r.suite_size));
    queries.push_back(static_cast<double>(r.queries));
    calls.push_back(static_cast<double>(r.solver_calls));
    wall.push_back(r.wall_seconds);
  }
  a.probability = runs.empty() ? 0 : static_cast<double>(found) / static_cast<double>(runs.size());
  a.suite_size = mean_sem(sizes);
  a.queries = mean_sem(queries);
  a.solver_calls = mean_sem(calls);
  a.wall_seconds = mean_sem(wall);
  return a;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report_csv(const std::vector<RunRecord>& runs, std::ostream& out, bool include_timing) {
  out << "mut,property,tester,seed,found,suite_size,queries,solver_calls";
  if (include_timing) out << ",wall_seconds";
  out << ",error\n";
  for (const auto& r : runs) {
    out << csv_field(r.mut) << ',' << csv_field(r.property) << ',' << r.tester << ',' << r.seed << ','
        << (r.found ? 1 : 0) << ',' << r.suite_size << ',' << r.queries << ',' << r.solver_calls;
    if (include_timing) out << ',' << fixed(r.wall_seconds, 3);
    out << ',' << csv_field(r.error.value_or("")) << '\n';
  }
}

void write_summary(const std::vector<RunRecord>& runs, std::ostream& out, bool include_timing) {
  if (runs.empty()) return;
  Aggregate a = aggregate(runs);
  out << "property:    " << runs.front().property << "\n";
  out << "tester:      " << runs.front().tester << "\n";
  out << "runs:        " << a.runs << "\n";
  out << "probability: " << fixed(a.probability, 2) << "\n";
  out << "suite size:  " << fixed(a.suite_size.mean, 2) << " +- " << fixed(a.suite_size.sem, 2) << "\n";
  out << "queries:     " << fixed(a.queries.mean, 1) << " +- " << fixed(a.queries.sem, 1) << "\n";
  out << "solver:      " << fixed(a.solver_calls.mean, 1) << " +- " << fixed(a.solver_calls.sem, 1) << "\n";
  if (include_timing) {
    out << "wall time:   " << fixed(a.wall_seconds.mean, 3) << " +- " << fixed(a.wall_seconds.sem, 3) << " s\n";
  }
  for (const auto& r : runs) {
    if (r.error) out << "error (seed " << r.seed << "): " << *r.error << "\n";
  }
}

}  // namespace mlcheck
