#include "mlcheck/oracle.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mlcheck/error.hpp"

namespace mlcheck {
namespace {

constexpr std::size_t kMaxTableSize = std::size_t{1} << 22;

using Json = nlohmann::json;

Prediction prediction_from_json(const Json& j) {
  Prediction z;
  if (j.is_array()) {
    for (const auto& c : j) z.classes.push_back(c.get<std::int64_t>());
  } else {
    z.classes.push_back(j.get<std::int64_t>());
  }
  return z;
}

Instance instance_from_json(const Json& j) {
  Instance x;
  for (const auto& v : j) {
    if (v.is_string()) {
      x.values.push_back(parse_rational(v.get<std::string>()));
    } else if (v.is_number_integer()) {
      x.values.emplace_back(v.get<long>());
    } else {
      x.values.push_back(from_double(v.get<double>()));
    }
  }
  return x;
}

/// Calls f on every instance of a fully-discrete schema, in lexicographic order.
template <typename F>
void for_each_instance(const DatasetSchema& schema, F&& f) {
  std::vector<std::vector<Rational>> domains;
  std::size_t total = 1;
  for (const auto& feature : schema.features()) {
    domains.push_back(feature_domain(feature));
    total *= domains.back().size();
    if (total > kMaxTableSize) throw SchemaError("schema domain too large to tabulate");
  }
  std::vector<std::size_t> idx(domains.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Instance x;
    for (std::size_t i = 0; i < domains.size(); ++i) x.values.push_back(domains[i][idx[i]]);
    f(x);
    for (std::size_t i = domains.size(); i-- > 0;) {
      if (++idx[i] < domains[i].size()) break;
      idx[i] = 0;
    }
  }
}

void check_prediction(const DatasetSchema& schema, const Prediction& z, const std::string& where) {
  auto bad = validate_prediction(schema, z);
  if (!bad.empty()) throw SchemaError(where + ": " + bad.front());
}

}  // namespace

RuleModel::RuleModel(std::string var, std::vector<Rule> rules, Prediction fallback)
    : var_(std::move(var)), rules_(std::move(rules)), fallback_(std::move(fallback)) {
  for (const auto& r : rules_) {
    if (has_predict_ref(*r.when)) throw PropertyError("rule conditions may only reference features");
    for (const auto& v : referenced_vars(*r.when)) {
      if (v != var_) throw PropertyError("rule condition references '" + v + "', expected '" + var_ + "'");
    }
  }
}

Prediction RuleModel::predict(const Instance& x) {
  Valuation v;
  v.instances.emplace(var_, x);
  for (const auto& r : rules_) {
    if (evaluate(*r.when, v)) return r.then;
  }
  return fallback_;
}

TableModel::TableModel(const DatasetSchema& schema, std::map<Instance, Prediction> table) : table_(std::move(table)) {
  if (!schema.fully_discrete()) throw SchemaError("table models need a fully-discrete schema");
  for_each_instance(schema, [&](const Instance& x) {
    if (!table_.count(x)) throw SchemaError("table model has no entry for an instance");
  });
}

Prediction TableModel::predict(const Instance& x) {
  auto it = table_.find(x);
  if (it == table_.end()) throw OracleError(OracleError::Kind::invalid_request, "instance not in table");
  return it->second;
}

// ---------------------------------------------------------------------------
// External process
// ---------------------------------------------------------------------------

std::string format_predict_request(const Instance& x) {
  std::string line = "PREDICT ";
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    int digits = decimal_digits(x.values[i]);
    if (digits < 0 || digits > 9) {
      throw OracleError(OracleError::Kind::invalid_request,
                        "value " + to_string(x.values[i]) + " needs more than 9 fractional digits");
    }
    if (i) line += ',';
    line += to_decimal(x.values[i]);
  }
  return line;
}

Prediction parse_class_reply(const std::string& line, std::size_t labels) {
  auto violation = [&](const std::string& why) {
    return OracleError(OracleError::Kind::protocol, "protocol violation (" + why + "): '" + line + "'");
  };
  if (line.rfind("CLASS ", 0) != 0) throw violation("expected CLASS");
  Prediction z;
  std::string body = line.substr(6);
  std::size_t start = 0;
  while (true) {
    auto comma = body.find(',', start);
    std::string item = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t k = item.size() && item[0] == '-' ? 1 : 0;
    if (k == item.size()) throw violation("empty class code");
    for (std::size_t c = k; c < item.size(); ++c) {
      if (item[c] < '0' || item[c] > '9') throw violation("non-integer class code");
    }
    try {
      z.classes.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw violation("class code out of range");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (z.classes.size() != labels) {
    throw OracleError(OracleError::Kind::label_mismatch,
                      "label-count mismatch: expected " + std::to_string(labels) + " classes in '" + line + "'");
  }
  return z;
}

ExternalModel::ExternalModel(std::string command, const DatasetSchema& schema, std::chrono::milliseconds timeout)
    : command_(std::move(command)), labels_(schema.l_size()), timeout_(timeout), process_(command_) {
  std::string reply = exchange("INIT");
  if (reply.rfind("READY ", 0) != 0) {
    throw OracleError(OracleError::Kind::handshake, "handshake failed: expected 'READY <m>', got '" + reply + "'",
                      "INIT");
  }
  std::string count = reply.substr(6);
  bool digits = !count.empty() && count.find_first_not_of("0123456789") == std::string::npos;
  if (!digits) throw OracleError(OracleError::Kind::handshake, "handshake failed: bad label count in '" + reply + "'", "INIT");
  if (std::stoul(count) != labels_) {
    throw OracleError(OracleError::Kind::label_mismatch,
                      "label-count mismatch: model reports " + count + " labels, schema has " + std::to_string(labels_),
                      "INIT");
  }
}

ExternalModel::~ExternalModel() {
  if (process_.running()) {
    process_.write("SHUTDOWN\n");
    process_.finish(std::chrono::milliseconds(200));
  }
}

std::string ExternalModel::exchange(const std::string& request) {
  if (!process_.write(request + "\n")) {
    throw OracleError(OracleError::Kind::died, "model process is not accepting input", request);
  }
  std::string line;
  switch (process_.read_line(line, timeout_)) {
    case Subprocess::ReadStatus::ok:
      return line;
    case Subprocess::ReadStatus::timeout:
      process_.terminate();
      throw OracleError(OracleError::Kind::timeout,
                        "model did not reply within " + std::to_string(timeout_.count()) + " ms to '" + request + "'",
                        request);
    case Subprocess::ReadStatus::eof:
      break;
  }
  process_.terminate();
  throw OracleError(OracleError::Kind::died, "model process exited while handling '" + request + "'", request);
}

Prediction ExternalModel::predict(const Instance& x) {
  std::string request = format_predict_request(x);
  std::string reply = exchange(request);
  try {
    return parse_class_reply(reply, labels_);
  } catch (const OracleError& e) {
    throw OracleError(e.kind(), std::string(e.what()) + " in reply to '" + request + "'", request);
  }
}

// ---------------------------------------------------------------------------
// ModelUnderTest
// ---------------------------------------------------------------------------

ModelUnderTest::ModelUnderTest(DatasetSchema schema, std::unique_ptr<ModelBackend> backend)
    : schema_(std::move(schema)), backend_(std::move(backend)) {}

Prediction ModelUnderTest::predict(const Instance& x) {
  std::lock_guard lock(mutex_);
  auto bad = validate_instance(schema_, x);
  if (!bad.empty()) {
    throw OracleError(OracleError::Kind::invalid_request, "invalid instance: " + bad.front());
  }
  ++queries_;
  if (auto it = cache_.find(x); it != cache_.end()) return it->second;
  ++backend_calls_;
  Prediction z = backend_->predict(x);
  auto wrong = validate_prediction(schema_, z);
  if (!wrong.empty()) {
    std::string request = format_predict_request(x);
    throw OracleError(OracleError::Kind::protocol, "model returned an invalid prediction: " + wrong.front(), request);
  }
  cache_.emplace(x, z);
  return z;
}

std::vector<Prediction> ModelUnderTest::predict(std::span<const Instance> xs) {
  std::vector<Prediction> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(x));
  return out;
}

std::size_t ModelUnderTest::query_count() const {
  std::lock_guard lock(mutex_);
  return queries_;
}

std::size_t ModelUnderTest::backend_calls() const {
  std::lock_guard lock(mutex_);
  return backend_calls_;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

std::unique_ptr<ModelBackend> parse_builtin_model(std::string_view json_text, const DatasetSchema& schema) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed model description: ") + e.what());
  }
  try {
    std::string type = doc.at("type").get<std::string>();
    if (type == "constant") {
      Prediction z = prediction_from_json(doc.at("prediction"));
      check_prediction(schema, z, "constant model");
      return std::make_unique<ConstantModel>(z);
    }
    if (type == "rule") {
      std::string var = doc.value("var", std::string("x"));
      std::vector<RuleModel::Rule> rules;
      for (const auto& r : doc.at("rules")) {
        auto text = r.at("when").get<std::string>();
        Prediction then = prediction_from_json(r.at("then"));
        check_prediction(schema, then, "rule '" + text + "'");
        rules.push_back({parse_condition(text, {}, schema, {var}), then});
      }
      Prediction fallback = prediction_from_json(doc.at("default"));
      check_prediction(schema, fallback, "rule model default");
      return std::make_unique<RuleModel>(var, std::move(rules), fallback);
    }
    if (type == "table") {
      std::map<Instance, Prediction> table;
      for (const auto& e : doc.at("entries")) {
        Instance x = instance_from_json(e.at("x"));
        auto bad = validate_instance(schema, x);
        if (!bad.empty()) throw SchemaError("table entry: " + bad.front());
        Prediction z = prediction_from_json(e.at("y"));
        check_prediction(schema, z, "table entry");
        table[x] = z;
      }
      if (doc.contains("default")) {
        Prediction fallback = prediction_from_json(doc.at("default"));
        check_prediction(schema, fallback, "table default");
        for_each_instance(schema, [&](const Instance& x) { table.emplace(x, fallback); });
      }
      return std::make_unique<TableModel>(schema, std::move(table));
    }
    throw SchemaError("unknown builtin model type '" + type + "'");
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("model description: ") + e.what());
  }
}

ModelUnderTest spawn_external(const std::string& command, const DatasetSchema& schema,
                              std::chrono::milliseconds timeout) {
  return ModelUnderTest(schema, std::make_unique<ExternalModel>(command, schema, timeout));
}

ModelUnderTest load_model(std::string_view selector, const DatasetSchema& schema,
                          const std::filesystem::path& base_dir, std::chrono::milliseconds timeout) {
  if (selector.rfind("builtin:", 0) == 0) {
    std::filesystem::path path{std::string(selector.substr(8))};
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open model description '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return ModelUnderTest(schema, parse_builtin_model(buffer.str(), schema));
  }
  if (selector.rfind("external:", 0) == 0) return spawn_external(std::string(selector.substr(9)), schema, timeout);
  throw SchemaError("model selector must be builtin:<file> or external:<command>");
}

}  // namespace mlcheck
