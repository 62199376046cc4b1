#include "mlcheck/engine.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "mlcheck/error.hpp"

namespace mlcheck {

CandidateCheck check_candidate(ModelUnderTest& mut, const PropertySpec& spec, const std::vector<Instance>& instances) {
  if (instances.size() != spec.instance_vars.size()) throw Error("candidate does not match the property's variables");
  CandidateCheck out;
  Valuation v;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    Prediction p = mut.predict(instances[k]);
    v.instances[spec.instance_vars[k]] = instances[k];
    v.predictions[spec.instance_vars[k]] = p;
    out.predictions.push_back(std::move(p));
  }
  for (const auto& a : spec.assumes) {
    if (!evaluate(*a.ast, v)) return out;
  }
  out.valid = !evaluate(*spec.assertion.ast, v);
  return out;
}

FeatureBounds derive_bounds(const std::vector<Instance>& rows) {
  if (rows.empty()) throw Error("cannot derive bounds from empty data");
  FeatureBounds b{rows.front().values, rows.front().values};
  for (const auto& x : rows) {
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      if (x.values[i] < b.min[i]) b.min[i] = x.values[i];
      if (x.values[i] > b.max[i]) b.max[i] = x.values[i];
    }
  }
  return b;
}

FeatureBounds derive_bounds(const LabeledSet& data) {
  std::vector<Instance> rows;
  for (const auto& r : data.rows()) rows.push_back(r.x);
  return derive_bounds(rows);
}

namespace {

class Engine {
 public:
  Engine(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema, const EngineConfig& cfg)
      : mut_(mut), spec_(spec), schema_(schema), cfg_(cfg), rng_(cfg.seed) {}

  TestSuite run() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t queries_before = mut_.query_count();
    suite_.property = spec_.name;
    suite_.tester = cfg_.wbm == WhiteBox::dt ? "engine-dt" : "engine-nn";
    suite_.seed = cfg_.seed;
    suite_.instance_vars = spec_.instance_vars;
    try {
      loop();
    } catch (const OracleError& e) {
      stats().error = std::string("oracle failure: ") + e.what();
      stats().stop_reason = "error";
    } catch (const SolverError& e) {
      stats().error = std::string("solver failure: ") + e.what();
      stats().stop_reason = "error";
    }
    stats().queries = mut_.query_count() - queries_before;
    stats().wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(suite_);
  }

 private:
  SuiteStats& stats() { return suite_.stats; }

  void add_random_rows(std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      Instance x = random_instance(schema_, rng_);
      Prediction y = mut_.predict(x);
      data_.add(std::move(x), std::move(y));
    }
  }

  void train() {
    TrainParams params = cfg_.train;
    params.mlp.seed = cfg_.seed * 1000003 + trainings_;
    if (cfg_.wbm == WhiteBox::dt) {
      surrogate_ = train_decision_tree(data_, schema_, params.dt);
    } else {
      surrogate_ = train_mlp(data_, schema_, params.mlp);
    }
    ++trainings_;
    script_ = encode_property(spec_, schema_, *surrogate_, bounds_);
    session_blocks_.clear();
    disagreements_ = 0;
  }

  void retrain() {
    train();
    ++stats().retrains;
  }

  void dump(const std::vector<std::string>& extra) {
    if (!cfg_.dump_smt) return;
    std::filesystem::create_directories(*cfg_.dump_smt);
    std::ostringstream name;
    name << "query_" << std::setw(5) << std::setfill('0') << stats().solver_calls << ".smt2";
    std::ofstream out(*cfg_.dump_smt / name.str());
    out << script_->body();
    for (const auto& e : extra) out << "(assert " << e << ")\n";
    out << "(check-sat)\n";
  }

  bool budget_left() const { return suite_.stats.samples < cfg_.max_samples; }

  void loop() {
    if (cfg_.initial_train_size == 0) throw Error("initial_train_size must be positive");
    add_random_rows(cfg_.initial_train_size);
    stats().seeded = cfg_.initial_train_size;
    if (cfg_.bound_cex) bounds_ = cfg_.bound_data ? derive_bounds(*cfg_.bound_data) : derive_bounds(data_);
    train();

    bool fresh_batch_used = false;
    for (;;) {
      if (!budget_left()) {
        stats().stop_reason = "budget";
        return;
      }
      std::vector<std::string> extra = permanent_blocks_;
      extra.insert(extra.end(), session_blocks_.begin(), session_blocks_.end());
      ++stats().solver_calls;
      dump(extra);
      SolveResult result = solve(*script_, schema_, cfg_.solver, extra);

      if (result.status != SolveStatus::sat) {
        if (disagreements_ > 0) {
          // pending disagreements may be all that keeps the script UNSAT
          retrain();
          continue;
        }
        if (fresh_batch_used) {
          stats().stop_reason = std::string(to_string(result.status));
          return;
        }
        fresh_batch_used = true;
        // keep one slot for the candidate of the retrained surrogate
        std::size_t batch = std::min(cfg_.initial_train_size, cfg_.max_samples - stats().samples - 1);
        add_random_rows(batch);
        stats().samples += batch;
        retrain();
        continue;
      }

      const Assignment& a = *result.assignment;
      std::vector<Instance> candidate;
      for (const auto& x : a.instances) candidate.push_back(snap_instance(schema_, x));
      ++stats().samples;
      CandidateCheck check = check_candidate(mut_, spec_, candidate);
      if (check.valid) {
        suite_.counterexamples.push_back({candidate, check.predictions, a.predictions, stats().solver_calls});
        if (!cfg_.multi) {
          stats().stop_reason = "found";
          return;
        }
        if (suite_.counterexamples.size() >= cfg_.max_samples) {
          stats().stop_reason = "suite-full";
          return;
        }
        permanent_blocks_.push_back(block_assignment(a, schema_));
        Assignment snapped = a;
        snapped.instances = candidate;
        if (snapped.instances != a.instances) permanent_blocks_.push_back(block_assignment(snapped, schema_));
      } else {
        ++stats().rejected;
        for (std::size_t k = 0; k < candidate.size(); ++k) data_.add(candidate[k], check.predictions[k]);
        session_blocks_.push_back(block_assignment(a, schema_));
        if (++disagreements_ >= cfg_.retrain_trigger) retrain();
      }
    }
  }

  ModelUnderTest& mut_;
  const PropertySpec& spec_;
  const DatasetSchema& schema_;
  const EngineConfig& cfg_;
  Rng rng_;
  TestSuite suite_;
  LabeledSet data_;
  std::optional<Surrogate> surrogate_;
  std::optional<SmtScript> script_;
  std::optional<FeatureBounds> bounds_;
  std::vector<std::string> permanent_blocks_;
  std::vector<std::string> session_blocks_;
  std::size_t disagreements_ = 0;
  std::size_t trainings_ = 0;
};

nlohmann::ordered_json values_json(const std::vector<Rational>& values) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

}  // namespace

TestSuite generate_test_suite(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                              const EngineConfig& cfg) {
  if (cfg.max_samples == 0) throw Error("max_samples must be positive");
  if (cfg.retrain_trigger == 0) throw Error("retrain_trigger must be positive");
  return Engine(mut, spec, schema, cfg).run();
}

void write_suite_jsonl(const TestSuite& suite, std::ostream& out, bool include_timing) {
  using nlohmann::ordered_json;
  for (const auto& ce : suite.counterexamples) {
    ordered_json rec;
    rec["type"] = "counterexample";
    rec["property"] = suite.property;
    rec["tester"] = suite.tester;
    rec["iteration"] = ce.iteration;
    ordered_json instances = ordered_json::object();
    ordered_json predictions = ordered_json::object();
    ordered_json surrogate = ordered_json::object();
    for (std::size_t k = 0; k < ce.instances.size(); ++k) {
      const std::string& var = suite.instance_vars.at(k);
      instances[var] = values_json(ce.instances[k].values);
      predictions[var] = ce.mut_predictions.at(k).classes;
      if (k < ce.surrogate_predictions.size()) surrogate[var] = ce.surrogate_predictions[k].classes;
    }
    rec["instances"] = std::move(instances);
    rec["predictions"] = std::move(predictions);
    if (!ce.surrogate_predictions.empty()) rec["surrogate_predictions"] = std::move(surrogate);
    out << rec.dump() << "\n";
  }
  const auto& s = suite.stats;
  ordered_json rec;
  rec["type"] = "stats";
  rec["property"] = suite.property;
  rec["tester"] = suite.tester;
  rec["seed"] = suite.seed;
  rec["counterexamples"] = suite.counterexamples.size();
  rec["queries"] = s.queries;
  rec["solver_calls"] = s.solver_calls;
  rec["retrains"] = s.retrains;
  rec["rejected"] = s.rejected;
  rec["samples"] = s.samples;
  rec["seeded"] = s.seeded;
  rec["stop_reason"] = s.stop_reason;
  if (s.error) rec["error"] = *s.error;
  if (include_timing) rec["wall_seconds"] = s.wall_seconds;
  out << rec.dump() << "\n";
}

}  // namespace mlcheck
