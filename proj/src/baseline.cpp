#include "mlcheck/baseline.hpp"

#include <chrono>
#include <set>

#include "mlcheck/error.hpp"

namespace mlcheck {

namespace {

void flatten(const CondPtr& c, std::vector<CondPtr>& out) {
  if (const auto* b = std::get_if<CondBinary>(&c->node); b && b->op == BoolOp::conj) {
    flatten(b->lhs, out);
    flatten(b->rhs, out);
    return;
  }
  out.push_back(c);
}

const FeatureRef* as_feature(const ArithPtr& a) { return std::get_if<FeatureRef>(&a->node); }

}  // namespace

AssumeSampler::AssumeSampler(const PropertySpec& spec, const DatasetSchema& schema) : spec_(spec), schema_(schema) {
  std::vector<CondPtr> parts;
  for (const auto& a : spec.assumes) flatten(a.ast, parts);
  for (const auto& part : parts) {
    CmpOp op;
    const Compare* cmp = std::get_if<Compare>(&part->node);
    if (cmp) {
      op = cmp->op;
    } else if (const auto* n = std::get_if<Not>(&part->node)) {
      cmp = std::get_if<Compare>(&n->operand->node);
      if (!cmp || cmp->op != CmpOp::eq) continue;
      op = CmpOp::ne;
    } else {
      continue;
    }
    const FeatureRef* l = as_feature(cmp->lhs);
    const FeatureRef* r = as_feature(cmp->rhs);
    auto slot = [&](const FeatureRef* f) { return Slot{spec.var_index(f->var), f->feature}; };
    if (op == CmpOp::eq) {
      if (l && r) {
        equal_.push_back({slot(l), slot(r)});
      } else if (l && is_constant(*cmp->rhs)) {
        pins_.push_back({slot(l), constant_value(*cmp->rhs)});
      } else if (r && is_constant(*cmp->lhs)) {
        pins_.push_back({slot(r), constant_value(*cmp->lhs)});
      }
    } else if (op == CmpOp::ne && l && r && l->feature == r->feature && l->var != r->var) {
      differ_.push_back({slot(l), slot(r)});
    }
  }
}

std::optional<std::vector<Instance>> AssumeSampler::draw(Rng& rng) const {
  std::vector<Instance> xs;
  for (std::size_t k = 0; k < spec_.instance_vars.size(); ++k) xs.push_back(random_instance(schema_, rng));
  auto at = [&](const Slot& s) -> Rational& { return xs[s.var].values[s.feature]; };
  for (const auto& p : pins_) at(p.slot) = p.value;
  for (const auto& e : equal_) at(e.to) = at(e.from);
  for (const auto& d : differ_) {
    const auto& feature = schema_.feature(d.to.feature);
    for (int tries = 0; tries < 64 && at(d.to) == at(d.from); ++tries) at(d.to) = random_value(feature, rng);
  }
  Valuation v;
  for (std::size_t k = 0; k < xs.size(); ++k) v.instances[spec_.instance_vars[k]] = xs[k];
  for (const auto& a : spec_.assumes) {
    if (has_predict_ref(*a.ast)) continue;  // needs MUT output; checked later
    if (!evaluate(*a.ast, v)) return std::nullopt;
  }
  return xs;
}

std::vector<Instance> AssumeSampler::sample(Rng& rng, std::size_t& rejections, std::size_t max_rejections) const {
  for (;;) {
    if (auto xs = draw(rng)) return *xs;
    if (++rejections > max_rejections) throw PropertyError("assumptions unsatisfiable by sampling");
  }
}

Rational squared_distance(const std::vector<Instance>& a, const std::vector<Instance>& b) {
  Rational sum = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].values.size(); ++i) {
      Rational d = a[k].values[i] - b[k].values[i];
      sum += d * d;
    }
  }
  return sum;
}

std::size_t art_select(const std::vector<std::vector<Instance>>& candidates,
                       const std::vector<std::vector<Instance>>& executed) {
  if (candidates.empty()) throw Error("no ART candidates");
  if (executed.empty()) return 0;
  std::size_t best = 0;
  Rational best_score;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    Rational nearest = squared_distance(candidates[c], executed.front());
    for (const auto& e : executed) {
      Rational d = squared_distance(candidates[c], e);
      if (d < nearest) nearest = d;
    }
    if (c == 0 || nearest > best_score) {
      best = c;
      best_score = nearest;
    }
  }
  return best;
}

namespace {

TestSuite run_sampling(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                       const BaselineConfig& cfg, bool adaptive) {
  if (cfg.budget == 0) throw Error("budget must be positive");
  if (adaptive && cfg.art_pool == 0) throw Error("art_pool must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t queries_before = mut.query_count();
  TestSuite suite;
  suite.property = spec.name;
  suite.tester = adaptive ? "art" : "random";
  suite.seed = cfg.seed;
  suite.instance_vars = spec.instance_vars;
  auto& stats = suite.stats;

  Rng rng(cfg.seed);
  AssumeSampler sampler(spec, schema);
  std::size_t rejections = 0;
  const std::size_t max_rejections = 1000 * cfg.budget;
  std::vector<std::vector<Instance>> executed;
  std::set<std::vector<Instance>> found;
  try {
    while (stats.samples < cfg.budget) {
      std::vector<Instance> candidate;
      if (adaptive) {
        std::vector<std::vector<Instance>> pool;
        for (std::size_t k = 0; k < cfg.art_pool; ++k) pool.push_back(sampler.sample(rng, rejections, max_rejections));
        candidate = std::move(pool[art_select(pool, executed)]);
      } else {
        candidate = sampler.sample(rng, rejections, max_rejections);
      }
      ++stats.samples;
      CandidateCheck check = check_candidate(mut, spec, candidate);
      if (adaptive) executed.push_back(candidate);
      if (!check.valid) {
        ++stats.rejected;
        continue;
      }
      if (!found.insert(candidate).second) continue;
      suite.counterexamples.push_back({candidate, check.predictions, {}, stats.samples});
      if (!cfg.multi) {
        stats.stop_reason = "found";
        break;
      }
    }
    if (stats.stop_reason.empty()) stats.stop_reason = "budget";
  } catch (const PropertyError& e) {
    stats.error = e.what();
    stats.stop_reason = "error";
  } catch (const OracleError& e) {
    stats.error = std::string("oracle failure: ") + e.what();
    stats.stop_reason = "error";
  }
  stats.queries = mut.query_count() - queries_before;
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return suite;
}

}  // namespace

TestSuite random_test(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                      const BaselineConfig& cfg) {
  return run_sampling(mut, spec, schema, cfg, false);
}

TestSuite adaptive_random_test(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                               const BaselineConfig& cfg) {
  return run_sampling(mut, spec, schema, cfg, true);
}

TestSuite run_baseline(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                       const BaselineConfig& cfg) {
  return cfg.kind == BaselineKind::art ? adaptive_random_test(mut, spec, schema, cfg)
                                       : random_test(mut, spec, schema, cfg);
}

}  // namespace mlcheck
