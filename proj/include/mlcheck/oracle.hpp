#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "mlcheck/propdsl.hpp"
#include "mlcheck/schema.hpp"
#include "mlcheck/subprocess.hpp"

namespace mlcheck {

/// Black-box prediction backend. Implementations must be deterministic.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual Prediction predict(const Instance& x) = 0;
  virtual std::string describe() const = 0;
};

class ConstantModel final : public ModelBackend {
 public:
  explicit ConstantModel(Prediction z) : z_(std::move(z)) {}
  Prediction predict(const Instance&) override { return z_; }
  std::string describe() const override { return "constant"; }

 private:
  Prediction z_;
};

/// First matching rule wins; conditions range over the features of `var`.
class RuleModel final : public ModelBackend {
 public:
  struct Rule {
    CondPtr when;
    Prediction then;
  };

  RuleModel(std::string var, std::vector<Rule> rules, Prediction fallback);
  Prediction predict(const Instance& x) override;
  std::string describe() const override { return "rule"; }

 private:
  std::string var_;
  std::vector<Rule> rules_;
  Prediction fallback_;
};

/// Exhaustive lookup over a fully-discrete schema.
class TableModel final : public ModelBackend {
 public:
  /// Throws SchemaError unless every valid instance has an entry.
  TableModel(const DatasetSchema& schema, std::map<Instance, Prediction> table);
  Prediction predict(const Instance& x) override;
  std::string describe() const override { return "table"; }

  const std::map<Instance, Prediction>& table() const { return table_; }

 private:
  std::map<Instance, Prediction> table_;
};

/// Child process speaking the line protocol
///   INIT -> READY <m>;  PREDICT v1,..,vn -> CLASS c1,..,cm;  SHUTDOWN
class ExternalModel final : public ModelBackend {
 public:
  ExternalModel(std::string command, const DatasetSchema& schema,
                std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~ExternalModel() override;

  Prediction predict(const Instance& x) override;
  std::string describe() const override { return "external:" + command_; }

 private:
  std::string exchange(const std::string& request);

  std::string command_;
  std::size_t labels_;
  std::chrono::milliseconds timeout_;
  Subprocess process_;
};

/// Wire encoding of an instance: comma-separated decimals with at most nine
/// fractional digits.
std::string format_predict_request(const Instance& x);
/// Parses "CLASS c1,...,cm"; throws OracleError(protocol) on anything else.
Prediction parse_class_reply(const std::string& line, std::size_t labels);

/// The model under test: a backend plus a per-instance prediction cache and
/// query accounting. predict() is serialized internally, so a handle may be
/// passed between threads.
class ModelUnderTest {
 public:
  ModelUnderTest(DatasetSchema schema, std::unique_ptr<ModelBackend> backend);

  Prediction predict(const Instance& x);
  std::vector<Prediction> predict(std::span<const Instance> xs);

  const DatasetSchema& schema() const { return schema_; }
  std::string describe() const { return backend_->describe(); }

  /// Instances requested through predict(), cached or not.
  std::size_t query_count() const;
  /// Requests that reached the backend.
  std::size_t backend_calls() const;

 private:
  DatasetSchema schema_;
  std::unique_ptr<ModelBackend> backend_;
  std::map<Instance, Prediction> cache_;
  std::size_t queries_ = 0;
  std::size_t backend_calls_ = 0;
  mutable std::mutex mutex_;
};

/// Builtin model description (JSON):
///   {"type": "constant", "prediction": [4]}
///   {"type": "rule", "var": "x", "rules": [{"when": "x[gender] == 0", "then": [1]}], "default": [0]}
///   {"type": "table", "entries": [{"x": [0, 1], "y": [1]}, ...], "default": [0]}
std::unique_ptr<ModelBackend> parse_builtin_model(std::string_view json_text, const DatasetSchema& schema);

ModelUnderTest spawn_external(const std::string& command, const DatasetSchema& schema,
                              std::chrono::milliseconds timeout = std::chrono::seconds(10));

/// Resolves `builtin:<json file>` or `external:<command>`.
ModelUnderTest load_model(std::string_view selector, const DatasetSchema& schema,
                          const std::filesystem::path& base_dir = {},
                          std::chrono::milliseconds timeout = std::chrono::seconds(10));

}  // namespace mlcheck
