#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlcheck/propdsl.hpp"
#include "mlcheck/rational.hpp"
#include "mlcheck/schema.hpp"
#include "mlcheck/subprocess.hpp"
#include "mlcheck/surrogate.hpp"

namespace mlcheck {

/// Variable naming. Copies are numbered from 1.
namespace smtvar {
std::string feature(std::size_t i, std::size_t copy);
std::string label(std::size_t l, std::size_t copy);
/// Tree node: s_<index>_<level>_<copy>, index 1-based within its level.
std::string node(std::size_t level, std::size_t index, std::size_t copy);
std::string neuron_in(std::size_t layer, std::size_t i, std::size_t copy);
std::string neuron_out(std::size_t layer, std::size_t i, std::size_t copy);
}  // namespace smtvar

/// Real-sorted literal: 3.0, (- 3.0), (/ 1.0 3.0).
std::string real_literal(const Rational& v);
/// Int-sorted literal: 3, (- 3).
std::string int_literal(const Rational& v);
/// A quantized weight as (/ k.0 1000.0).
std::string weight_literal(const Rational& w);

/// Declarations plus assertion terms (without the `(assert ...)` wrapper).
struct Fragment {
  std::vector<std::string> declarations;
  std::vector<std::string> assertions;

  void append(const Fragment& other);
};

struct SmtScript {
  std::string logic = "QF_LIRA";
  std::vector<std::string> declarations;
  std::vector<std::string> assertions;
  std::size_t copies = 0;
  std::size_t features = 0;
  std::size_t labels = 0;

  void add(const Fragment& f);
  /// Variables fetched after a SAT answer: features then labels, copy-major.
  std::vector<std::string> query_vars() const;
  /// set-logic, declarations and assertions.
  std::string body() const;
  /// body() followed by (check-sat) and (get-value ...).
  std::string text() const;
};

/// Per-feature inclusive bounds used when bound_cex is on.
struct FeatureBounds {
  std::vector<Rational> min;
  std::vector<Rational> max;
};

Fragment encode_domain(const DatasetSchema& schema, std::size_t copy);
Fragment encode_decision_tree(const DecisionTree& tree, std::size_t copy, const DatasetSchema& schema);
Fragment encode_mlp(const MlpSurrogate& net, std::size_t copy, const DatasetSchema& schema);
Fragment encode_surrogate(const Surrogate& model, std::size_t copy, const DatasetSchema& schema);

/// Translates a property condition with instance variables bound to copies.
std::string encode_condition(const Cond& c, const PropertySpec& spec, const DatasetSchema& schema);

/// Domain constraints, one surrogate copy per instance variable, the assume
/// clauses and the negated assertion. SAT iff the surrogate violates spec.
SmtScript encode_property(const PropertySpec& spec, const DatasetSchema& schema, const Surrogate& model,
                          const std::optional<FeatureBounds>& bounds = std::nullopt);

struct Assignment {
  /// Per copy.
  std::vector<Instance> instances;
  std::vector<Prediction> predictions;
  std::map<std::string, Rational> values;
  std::string raw;
};

/// Excludes the exact feature values of every copy in a.
std::string block_assignment(const Assignment& a, const DatasetSchema& schema);

enum class SolveStatus { sat, unsat, unknown };
std::string_view to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::unknown;
  std::optional<Assignment> assignment;
  std::string raw;
};

struct SolverConfig {
  std::string command = "z3 -in";
  std::chrono::milliseconds timeout{30000};
};

/// Solver command from MLCHECK_SOLVER, else "z3 -in".
std::string default_solver_command();

/// Parses the reply to (check-sat)(get-value ...) for the given script.
SolveResult parse_solver_output(const std::string& raw, const SmtScript& script, const DatasetSchema& schema,
                                const std::vector<std::string>& extra_vars = {});

/// Batch mode: one solver process per call. `extra` assertions are appended
/// to the script and `extra_vars` are fetched in addition to the query vars.
SolveResult solve(const SmtScript& script, const DatasetSchema& schema, const SolverConfig& config,
                  const std::vector<std::string>& extra = {}, const std::vector<std::string>& extra_vars = {});

/// Interactive mode: the script body is loaded once and each check runs
/// inside push/pop. Restarts the process after a timeout.
class SolverSession {
 public:
  SolverSession(SmtScript script, const DatasetSchema& schema, SolverConfig config);

  SolveResult check(const std::vector<std::string>& extra = {}, const std::vector<std::string>& extra_vars = {});

 private:
  void start();
  std::string read_reply(std::chrono::steady_clock::time_point deadline);

  SmtScript script_;
  const DatasetSchema& schema_;
  SolverConfig config_;
  std::unique_ptr<Subprocess> process_;
};

}  // namespace mlcheck
