// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "../unit/support.hpp"
#include "mlcheck/baseline.hpp"
#include "mlcheck/bench.hpp"
#include "mlcheck/engine.hpp"
#include "mlcheck/error.hpp"
#include "mlcheck/sexpr.hpp"

using namespace mlcheck;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kDtBudgetSeconds = 60.0;
constexpr double kRunBudgetSeconds = 30.0;
constexpr std::size_t kSeeds = 20;
constexpr std::size_t kTrojanMinHits = 18;
constexpr std::size_t kMultiMinDistinct = 10;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Every engine suite produced by the gate, re-checked from scratch under
// criterion 5 with a freshly built MUT.
struct Recorded {
  std::string origin;
  TestSuite suite;
  const PropertySpec* spec;
  std::function<ModelUnderTest()> make_mut;
};
std::vector<Recorded> g_recorded;

TestSuite run_engine(const std::string& origin, const std::function<ModelUnderTest()>& make_mut,
                     const PropertySpec& spec, const DatasetSchema& schema, const EngineConfig& cfg) {
  auto mut = make_mut();
  auto suite = generate_test_suite(mut, spec, schema, cfg);
  g_recorded.push_back({origin, suite, &spec, make_mut});
  return suite;
}

EngineConfig engine_config(WhiteBox wbm, std::uint64_t seed, std::size_t max_samples, bool multi = false) {
  EngineConfig cfg;
  cfg.wbm = wbm;
  cfg.seed = seed;
  cfg.max_samples = max_samples;
  cfg.multi = multi;
  cfg.solver = solver_config();
  return cfg;
}

DatasetSchema abcd_schema() {
  return parse_schema(R"(<schema>
  <feature name="a" kind="categorical" categories="0,1"/>
  <feature name="b" kind="categorical" categories="0,1"/>
  <feature name="c" kind="categorical" categories="0,1"/>
  <feature name="d" kind="categorical" categories="0,1"/>
  <label name="lab" classes="0,1"/>
</schema>
)");
}

const char* kUnfairRule = R"({"type": "rule", "rules": [{"when": "x[b] == 1", "then": [1]}], "default": [0]})";

// ---------------------------------------------------------------------------

Outcome dt_equivalence() {
  auto s = binary_schema(6);
  auto xs = enumerate(s);
  auto start = Clock::now();
  std::size_t checks = 0;
  std::size_t wrong = 0;
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::uint64_t t = 0; t < kSeeds; ++t) {
    Rng rng(1000 + t);
    LabeledSet data;
    std::uniform_int_distribution<int> rows(10, 64);
    int n = rows(rng);
    for (int i = 0; i < n; ++i) data.add(random_instance(s, rng), Prediction{{coin(rng)}});
    auto tree = train_decision_tree(data, s);
    SmtScript sc;
    sc.copies = 1;
    sc.features = 6;
    sc.labels = 1;
    sc.add(encode_domain(s, 1));
    sc.add(encode_decision_tree(tree, 1, s));
    SolverSession session(sc, s, solver_config());
    for (const auto& x : xs) {
      auto want = dt_predict(tree, x).classes.front();
      if (walk_tree(tree, x).classes.front() != want) ++wrong;
      std::string pin = "(and";
      for (std::size_t i = 0; i < 6; ++i) pin += " (= " + smtvar::feature(i, 1) + " " + int_literal(x.values[i]) + ")";
      pin += ")";
      for (std::int64_t c = 0; c < 2; ++c) {
        auto r = session.check({pin, "(= " + smtvar::label(0, 1) + " " + std::to_string(c) + ")"});
        auto expect = c == want ? SolveStatus::sat : SolveStatus::unsat;
        if (r.status != expect) ++wrong;
        ++checks;
      }
    }
  }
  double secs = since(start);
  std::ostringstream d;
  d << checks << " checks, " << wrong << " disagreements, " << secs << " s (limit " << kDtBudgetSeconds << " s)";
  return {wrong == 0 && secs < kDtBudgetSeconds, d.str()};
}

Outcome nn_equivalence() {
  auto s = parse_schema(R"(<schema>
  <feature name="x0" min="-1" max="1"/><feature name="x1" min="-1" max="1"/>
  <feature name="x2" min="0" max="5"/><feature name="x3" kind="integer" min="0" max="9"/>
  <feature name="x4" kind="categorical" categories="0,1"/>
  <label name="l" classes="0,1,2"/></schema>)");
  std::size_t cases = 0;
  std::size_t class_wrong = 0;
  std::size_t value_wrong = 0;
  std::size_t skipped_ties = 0;
  for (std::uint64_t n = 0; n < kSeeds; ++n) {
    Rng rng(2000 + n);
    auto net = random_net(s, {10, 10}, rng, 3);
    SmtScript sc;
    sc.copies = 1;
    sc.features = 5;
    sc.labels = 1;
    sc.add(encode_domain(s, 1));
    sc.add(encode_mlp(net, 1, s));
    SolverSession session(sc, s, solver_config());
    std::vector<std::string> vars;
    for (std::size_t layer = 1; layer < net.layer_sizes.size(); ++layer) {
      for (std::size_t i = 0; i < net.layer_sizes[layer]; ++i) vars.push_back(smtvar::neuron_in(layer, i, 1));
    }
    int done = 0;
    while (done < 50) {
      auto x = random_instance(s, rng);
      auto want = mlp_forward(net, x);
      auto out = want.pre_activations.back();
      std::sort(out.begin(), out.end());
      if (out[1] == out[2]) {
        ++skipped_ties;
        continue;
      }
      std::string pin = "(and";
      for (std::size_t i = 0; i < 5; ++i) {
        bool real = s.feature(i).kind == FeatureKind::continuous;
        pin += " (= " + smtvar::feature(i, 1) + " " + (real ? real_literal(x.values[i]) : int_literal(x.values[i])) + ")";
      }
      pin += ")";
      auto r = session.check({pin}, vars);
      ++done;
      ++cases;
      if (r.status != SolveStatus::sat) {
        ++class_wrong;
        continue;
      }
      if (r.assignment->predictions[0] != want.prediction) ++class_wrong;
      std::size_t k = 0;
      for (const auto& layer : want.pre_activations) {
        for (const auto& v : layer) value_wrong += r.assignment->values.at(vars[k++]) != v;
      }
    }
  }
  std::ostringstream d;
  d << cases << " cases (" << skipped_ties << " tied inputs redrawn), " << class_wrong << " class mismatches, "
    << value_wrong << " pre-activation mismatches";
  return {class_wrong == 0 && value_wrong == 0 && cases == kSeeds * 50, d.str()};
}

bool same_tree(const SExpr& a, const SExpr& b) {
  if (a.is_atom != b.is_atom) return false;
  if (a.is_atom) return a.atom == b.atom;
  if (a.list.size() != b.list.size()) return false;
  for (std::size_t i = 0; i < a.list.size(); ++i) {
    if (!same_tree(a.list[i], b.list[i])) return false;
  }
  return true;
}

Outcome translation_fixture() {
  auto s = abcd_schema();
  auto spec = fairness_property(s, 1);

  // property level
  using namespace ast;
  auto eq = [](std::size_t i) { return compare(CmpOp::eq, feature("x", i), feature("y", i)); };
  auto golden_assume =
      conjunction({eq(0), compare(CmpOp::ne, feature("x", 1), feature("y", 1)), eq(2), eq(3)});
  auto golden_assert = compare(CmpOp::eq, predict("x", 0), predict("y", 0));
  bool ast_ok = *spec.assume_conjunction() == *golden_assume && *spec.assertion.ast == *golden_assert;

  // formula level: cross-copy conjuncts of the compiled script, renamed to
  // the a1/a2 ... class1_lab/class2_lab scheme
  DecisionTree t;
  TreeNode leaf;
  leaf.leaf = Prediction{{0}};
  t.nodes.push_back(leaf);
  auto script = encode_property(spec, s, t);
  const std::vector<std::string> names{"a", "b", "c", "d"};
  std::string conj = "(and";
  std::size_t model_conjuncts = 0;
  for (const auto& a : script.assertions) {
    std::set<std::string> copies;
    static const std::regex var("\\b[a-z]+(?:_[0-9]+)+\\b");
    for (std::sregex_iterator it(a.begin(), a.end(), var), end; it != end; ++it) {
      auto name = it->str();
      copies.insert(name.substr(name.rfind('_') + 1));
    }
    if (copies.size() < 2) {
      ++model_conjuncts;
      continue;
    }
    std::string r = a;
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (int c : {1, 2}) {
        r = std::regex_replace(r, std::regex("\\b" + smtvar::feature(i, c) + "\\b"), names[i] + std::to_string(c));
      }
    }
    for (int c : {1, 2}) {
      r = std::regex_replace(r, std::regex("\\b" + smtvar::label(0, c) + "\\b"), "class" + std::to_string(c) + "_lab");
    }
    conj += " " + r;
  }
  conj += ")";
  auto golden = parse_sexprs("(and (= a1 a2) (not (= b1 b2)) (= c1 c2) (= d1 d2) (not (= class1_lab class2_lab)))");
  bool formula_ok = same_tree(parse_sexprs(conj).front(), golden.front());
  std::ostringstream d;
  d << "spec AST " << (ast_ok ? "matches" : "differs") << ", compiled " << conj << " ("
    << model_conjuncts << " surrogate/domain conjuncts set aside)";
  return {ast_ok && formula_ok, d.str()};
}

Outcome planted_unfairness() {
  static const auto s = abcd_schema();
  static const auto spec = fairness_property(s, 1);
  auto make = [] { return ModelUnderTest(s, parse_builtin_model(kUnfairRule, s)); };
  std::size_t found = 0;
  std::size_t multi_ok = 0;
  double slowest = 0;
  std::size_t min_distinct = SIZE_MAX;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto t0 = Clock::now();
    auto suite = run_engine("c4-single", make, spec, s, engine_config(WhiteBox::dt, seed, 100));
    slowest = std::max(slowest, since(t0));
    found += !suite.counterexamples.empty();

    t0 = Clock::now();
    auto multi = run_engine("c4-multi", make, spec, s, engine_config(WhiteBox::dt, seed, 50, true));
    slowest = std::max(slowest, since(t0));
    std::set<std::vector<Instance>> distinct;
    for (const auto& c : multi.counterexamples) distinct.insert(c.instances);
    min_distinct = std::min(min_distinct, distinct.size());
    multi_ok += distinct.size() >= kMultiMinDistinct && distinct.size() == multi.counterexamples.size();
  }
  std::ostringstream d;
  d << "single: " << found << "/" << kSeeds << " found; multi: " << multi_ok << "/" << kSeeds << " with >= "
    << kMultiMinDistinct << " distinct (min " << min_distinct << "); slowest run " << slowest << " s";
  return {found == kSeeds && multi_ok == kSeeds && slowest < kRunBudgetSeconds, d.str()};
}

// trigger (f0, f1) = (0, 1), target class 1
struct TrojanTable {
  std::map<Instance, Prediction> table;
  std::vector<Instance> exceptions;
};

TrojanTable trojan_table(const DatasetSchema& s, bool with_exceptions) {
  TrojanTable out;
  Rng rng(606);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<Instance> triggered;
  for (const auto& x : enumerate(s)) {
    bool on = x.values[0] == 0 && x.values[1] == 1;
    out.table[x] = Prediction{{on ? 1 : coin(rng)}};
    if (on) triggered.push_back(x);
  }
  if (with_exceptions) {
    std::shuffle(triggered.begin(), triggered.end(), rng);
    for (int k = 0; k < 3; ++k) {
      out.table[triggered[k]] = Prediction{{0}};
      out.exceptions.push_back(triggered[k]);
    }
  }
  return out;
}

PropertySpec trojan_spec(const DatasetSchema& s) {
  return trojan_property(s, {0, 1}, Instance{{0, 1, 0, 0, 0, 0, 0, 0}}, Prediction{{1}});
}

Outcome planted_trojan() {
  static const auto s = binary_schema(8);
  static const auto spec = trojan_spec(s);
  static const auto poisoned = trojan_table(s, true);
  static const auto clean = trojan_table(s, false);
  // independent check of the planted table: exactly 3 violations
  std::size_t violations = 0;
  for (const auto& [x, y] : poisoned.table) {
    Valuation v{{{"x", x}}, {{"x", y}}};
    violations += evaluate(*spec.assume_conjunction(), v) && !evaluate(*spec.assertion.ast, v);
  }
  std::size_t hits = 0;
  std::size_t clean_empty = 0;
  std::set<Instance> exceptions(poisoned.exceptions.begin(), poisoned.exceptions.end());
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto suite = run_engine("c6-poisoned", [] { return ModelUnderTest(s, std::make_unique<TableModel>(s, poisoned.table)); },
                            spec, s, engine_config(WhiteBox::dt, seed, 200));
    bool hit = false;
    for (const auto& c : suite.counterexamples) hit = hit || exceptions.count(c.instances[0]);
    hits += hit;
    auto none = run_engine("c6-clean", [] { return ModelUnderTest(s, std::make_unique<TableModel>(s, clean.table)); }, spec,
                           s, engine_config(WhiteBox::dt, seed, 200));
    clean_empty += none.counterexamples.empty() && !none.stats.error;
  }
  std::ostringstream d;
  d << "planted violations " << violations << "; found one of them in " << hits << "/" << kSeeds << " seeds (need "
    << kTrojanMinHits << "); fully poisoned table empty in " << clean_empty << "/" << kSeeds;
  return {violations == 3 && hits >= kTrojanMinHits && clean_empty == kSeeds, d.str()};
}

Outcome concept_relationship() {
  static const auto s = parse_schema(R"(<schema><feature name="u" min="0" max="1"/><feature name="v" min="0" max="1"/>
    <label name="dog" classes="0,1"/><label name="animal" classes="0,1"/></schema>)");
  static const auto implies = concept_property(s, "dog => animal");
  static const auto always = concept_property(s, ast::boolean(true));
  auto make = [] {
    return ModelUnderTest(s, parse_builtin_model(R"({"type": "rule", "rules": [
      {"when": "x[u] < 0.5 and x[v] < 0.5", "then": [1, 0]}, {"when": "x[u] >= 0.5", "then": [1, 1]}],
      "default": [0, 0]})", s));
  };
  std::map<WhiteBox, std::size_t> found;
  std::map<WhiteBox, std::size_t> empty;
  double slowest = 0;
  for (auto wbm : {WhiteBox::dt, WhiteBox::nn}) {
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      auto t0 = Clock::now();
      auto suite = run_engine("c7-implies", make, implies, s, engine_config(wbm, seed, 200));
      slowest = std::max(slowest, since(t0));
      found[wbm] += !suite.counterexamples.empty();
      auto none = run_engine("c7-true", make, always, s, engine_config(wbm, seed, 200));
      empty[wbm] += none.counterexamples.empty() && !none.stats.error;
    }
  }
  std::ostringstream d;
  d << "dog => animal violated: dt " << found[WhiteBox::dt] << "/" << kSeeds << ", nn " << found[WhiteBox::nn] << "/"
    << kSeeds << "; phi = true empty: dt " << empty[WhiteBox::dt] << "/" << kSeeds << ", nn " << empty[WhiteBox::nn]
    << "/" << kSeeds << "; slowest run " << slowest << " s";
  bool ok = true;
  for (auto wbm : {WhiteBox::dt, WhiteBox::nn}) ok = ok && found[wbm] == kSeeds && empty[wbm] == kSeeds;
  return {ok, d.str()};
}

Outcome blocking() {
  // f0 + f1 = 4 over [0,4]^2: exactly five feature assignments; the class
  // variable stays free, so blocking must ignore it
  auto s = parse_schema(R"(<schema><feature name="p" kind="integer" min="0" max="4"/>
    <feature name="q" kind="integer" min="0" max="4"/><label name="l" classes="0,1"/></schema>)");
  SmtScript sc;
  sc.copies = 1;
  sc.features = 2;
  sc.labels = 1;
  sc.add(encode_domain(s, 1));
  sc.assertions.push_back("(= (+ f_0_1 f_1_1) 4)");
  std::vector<std::string> blocks;
  std::set<Instance> seen;
  SolveStatus last = SolveStatus::sat;
  for (int i = 0; i < 10; ++i) {
    auto r = solve(sc, s, solver_config(), blocks);
    last = r.status;
    if (r.status != SolveStatus::sat) break;
    seen.insert(r.assignment->instances[0]);
    blocks.push_back(block_assignment(*r.assignment, s));
  }
  std::ostringstream d;
  d << seen.size() << " distinct assignments from " << blocks.size() << " SAT answers, then " << to_string(last);
  return {seen.size() == 5 && blocks.size() == 5 && last == SolveStatus::unsat, d.str()};
}

Outcome bound_cex() {
  static const auto s = parse_schema(R"(<schema><feature name="amount" kind="integer" min="0" max="20"/>
    <feature name="group" kind="categorical" categories="0,1"/><feature name="flag" kind="categorical" categories="0,1"/>
    <label name="l" classes="0,1"/></schema>)");
  static const auto spec = fairness_property(s, 1);
  auto make = [] {
    return ModelUnderTest(s, parse_builtin_model(
                                 R"({"type": "rule", "rules": [{"when": "x[group] == 1", "then": [1]}], "default": [0]})", s));
  };
  std::vector<Instance> training;
  Rng rng(909);
  std::uniform_int_distribution<int> amount(2, 7);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int i = 0; i < 100; ++i) training.push_back(Instance{{amount(rng), coin(rng), coin(rng)}});
  auto b = derive_bounds(training);
  std::size_t instances = 0;
  std::size_t outside = 0;
  std::size_t empty = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto cfg = engine_config(WhiteBox::dt, seed, 50, true);
    cfg.bound_cex = true;
    cfg.bound_data = training;
    auto suite = run_engine("c9", make, spec, s, cfg);
    empty += suite.counterexamples.empty();
    for (const auto& c : suite.counterexamples) {
      for (const auto& x : c.instances) {
        ++instances;
        outside += x.values[0] < 2 || x.values[0] > 7;
      }
    }
  }
  std::ostringstream d;
  d << "training span f0 [" << to_string(b.min[0]) << "," << to_string(b.max[0]) << "]; " << instances
    << " suite instances, " << outside << " outside; " << empty << " empty suites";
  return {b.min[0] == 2 && b.max[0] == 7 && outside == 0 && instances > 0, d.str()};
}

Outcome baseline_harness(std::string& table) {
  auto dir = fs::temp_directory_path() / ("mlcheck-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto abcd = abcd_schema();
  auto s8 = binary_schema(8);
  std::ofstream(dir / "abcd.xml") << to_xml(abcd);
  std::ofstream(dir / "unfair.json") << kUnfairRule;
  std::ofstream(dir / "trojan8.xml") << to_xml(s8);
  std::ofstream(dir / "trojan.json") << R"({"features": [0, 1], "trigger": [0,1,0,0,0,0,0,0], "target": [1]})";
  {
    std::ofstream t(dir / "table.json");
    t << R"({"type": "table", "entries": [)";
    bool first = true;
    for (const auto& [x, y] : trojan_table(s8, true).table) {
      t << (first ? "" : ",") << "\n{\"x\": [";
      for (std::size_t i = 0; i < x.values.size(); ++i) t << (i ? "," : "") << to_string(x.values[i]);
      t << "], \"y\": [" << y.classes.front() << "]}";
      first = false;
    }
    t << "]}\n";
  }
  BenchManifest m;
  m.seeds = kSeeds;
  m.testers = {"engine-dt", "engine-nn", "random", "art"};
  m.base_dir = dir;
  BenchTask unfair;
  unfair.name = "planted-unfairness";
  unfair.schema = dir / "abcd.xml";
  unfair.property = "fairness:s=b";
  unfair.mut = "builtin:unfair.json";
  unfair.max_samples = 100;
  BenchTask trojan;
  trojan.name = "planted-trojan";
  trojan.schema = dir / "trojan8.xml";
  trojan.property = "trojan:trojan.json";
  trojan.mut = "builtin:table.json";
  trojan.max_samples = 200;
  m.tasks = {unfair, trojan};
  BenchOptions opt;
  opt.solver = solver_config();
  auto cells = run_bench(m, opt);
  std::ostringstream md;
  write_bench_table(cells, m, TableFormat::markdown, md);
  table = md.str();
  fs::remove_all(dir);

  std::map<std::string, double> p;
  std::size_t errors = 0;
  for (const auto& c : cells) {
    if (c.task == "planted-trojan") p[c.tester] = c.summary.probability;
    errors += c.summary.errors;
  }
  bool ok = cells.size() == 8 && errors == 0;
  for (const char* engine : {"engine-dt", "engine-nn"}) {
    ok = ok && p[engine] >= p["random"] && p[engine] >= p["art"];
  }
  std::ostringstream d;
  d << "8 cells, " << errors << " errored runs; trojan task probabilities engine-dt " << p["engine-dt"] << ", engine-nn "
    << p["engine-nn"] << ", random " << p["random"] << ", art " << p["art"];
  return {ok, d.str()};
}

Outcome determinism() {
  static const auto s = abcd_schema();
  static const auto spec = fairness_property(s, 1);
  auto make = [] { return ModelUnderTest(s, parse_builtin_model(kUnfairRule, s)); };
  std::size_t identical = 0;
  std::size_t total = 0;
  for (std::uint64_t seed : {0u, 7u, 19u}) {
    for (bool multi : {false, true}) {
      auto cfg = engine_config(WhiteBox::dt, seed, multi ? 50 : 100, multi);
      std::ostringstream a, b;
      write_suite_jsonl(run_engine("c11", make, spec, s, cfg), a);
      write_suite_jsonl(run_engine("c11", make, spec, s, cfg), b);
      identical += a.str() == b.str() && !a.str().empty();
      ++total;
    }
  }
  std::ostringstream d;
  d << identical << "/" << total << " repeated runs byte-identical";
  return {identical == total, d.str()};
}

Outcome soundness() {
  static const auto s = abcd_schema();
  static const auto spec = fairness_property(s, 1);
  auto make = [] { return ModelUnderTest(s, std::make_unique<ConstantModel>(Prediction{{0}})); };
  std::size_t nonempty = 0;
  std::size_t errored = 0;
  for (auto wbm : {WhiteBox::dt, WhiteBox::nn}) {
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      auto suite = run_engine("c5", make, spec, s, engine_config(wbm, seed, 100));
      nonempty += !suite.counterexamples.empty();
      errored += suite.stats.error.has_value();
    }
  }
  // re-evaluate every recorded entry from scratch
  std::size_t entries = 0;
  std::size_t failed = 0;
  for (const auto& r : g_recorded) {
    auto mut = r.make_mut();
    const auto& vars = r.spec->instance_vars;
    for (const auto& c : r.suite.counterexamples) {
      ++entries;
      Valuation v;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        v.instances[vars[k]] = c.instances[k];
        v.predictions[vars[k]] = mut.predict(c.instances[k]);
      }
      bool violates = evaluate(*r.spec->assume_conjunction(), v) && !evaluate(*r.spec->assertion.ast, v);
      if (!violates) {
        ++failed;
        std::cerr << "revalidation failed in " << r.origin << "\n";
      }
    }
  }
  std::ostringstream d;
  d << nonempty << "/" << 2 * kSeeds << " constant-model suites non-empty (" << errored << " errored); revalidated "
    << entries << " entries from " << g_recorded.size() << " engine runs, " << failed << " failed";
  return {nonempty == 0 && errored == 0 && failed == 0, d.str()};
}

}  // namespace

int main() {
  std::string table;
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
  };
  // criterion 5 runs last so that it revalidates every other suite
  std::vector<Criterion> criteria{
      {1, "DT encoding oracle equivalence", dt_equivalence},
      {2, "NN encoding oracle equivalence", nn_equivalence},
      {3, "fairness translation fixture", translation_fixture},
      {4, "planted unfairness end-to-end", planted_unfairness},
      {6, "planted trojan", planted_trojan},
      {7, "concept relationship", concept_relationship},
      {8, "augmentation and blocking", blocking},
      {9, "bound_cex", bound_cex},
      {10, "baseline harness", [&] { return baseline_harness(table); }},
      {11, "determinism", determinism},
      {5, "soundness, zero false positives", soundness},
  };
  std::map<int, std::string> lines;
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail;
    std::cerr << "[" << since(t0) << " s] " << line.str() << std::endl;
    lines[c.id] = line.str();
    failed += !o.pass;
  }
  if (!table.empty()) std::cout << "bench table (criterion 10):\n" << table << "\n";
  for (const auto& [id, line] : lines) std::cout << line << "\n";
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : std::string("acceptance: all passed"))
            << std::endl;
  return failed;
}
