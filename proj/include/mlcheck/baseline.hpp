#pragma once

#include <cstdint>
#include <vector>

#include "mlcheck/engine.hpp"

namespace mlcheck {

enum class BaselineKind { random, art };

struct BaselineConfig {
  std::size_t budget = 1000;
  BaselineKind kind = BaselineKind::random;
  std::size_t art_pool = 10;
  std::uint64_t seed = 0;
  bool multi = false;
};

/// Draws one value per instance variable satisfying the assume clauses.
/// Top-level `v[i] == const` pins, `v[i] == w[j]` copies and `v[i] != w[i]`
/// resampling are applied constructively; the remaining clauses are checked
/// by rejection.
class AssumeSampler {
 public:
  AssumeSampler(const PropertySpec& spec, const DatasetSchema& schema);

  /// nullopt when the draw violates an assume clause.
  std::optional<std::vector<Instance>> draw(Rng& rng) const;
  /// Retries draw() up to `max_rejections` times in total over the sampler's
  /// lifetime (tracked through `rejections`).
  std::vector<Instance> sample(Rng& rng, std::size_t& rejections, std::size_t max_rejections) const;

 private:
  struct Slot {
    std::size_t var;
    std::size_t feature;
  };
  struct Pin {
    Slot slot;
    Rational value;
  };
  struct Link {
    Slot from;
    Slot to;
  };

  const PropertySpec& spec_;
  const DatasetSchema& schema_;
  std::vector<Pin> pins_;
  std::vector<Link> equal_;
  std::vector<Link> differ_;
};

/// Squared euclidean distance over the concatenated feature vectors.
Rational squared_distance(const std::vector<Instance>& a, const std::vector<Instance>& b);

/// Index of the candidate maximizing the minimum distance to `executed`;
/// ties and an empty executed set pick the earliest candidate.
std::size_t art_select(const std::vector<std::vector<Instance>>& candidates,
                       const std::vector<std::vector<Instance>>& executed);

TestSuite random_test(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                      const BaselineConfig& cfg);
TestSuite adaptive_random_test(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                               const BaselineConfig& cfg);
/// Dispatches on cfg.kind.
TestSuite run_baseline(ModelUnderTest& mut, const PropertySpec& spec, const DatasetSchema& schema,
                       const BaselineConfig& cfg);

}  // namespace mlcheck
