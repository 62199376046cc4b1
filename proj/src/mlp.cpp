#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlcheck/error.hpp"
#include "mlcheck/surrogate.hpp"

namespace mlcheck {

Rational quantize(const Rational& p) {
  static const Rational kLimit(10);
  Rational clamped = p;
  if (clamped > kLimit) clamped = kLimit;
  if (clamped < -kLimit) clamped = -kLimit;
  return round_decimal(clamped, 3);
}

Rational quantize(double p) { return quantize(from_double(p)); }

void set_input_scaling(MlpSurrogate& net, const DatasetSchema& schema) {
  net.input_offset.clear();
  net.input_scale.clear();
  for (const auto& f : schema.features()) {
    net.input_offset.push_back(f.min);
    Rational range = f.max - f.min;
    net.input_scale.push_back(range > 0 ? Rational(1 / range) : Rational(1));
  }
}

ForwardPass mlp_forward(const MlpSurrogate& net, const Instance& x) {
  ForwardPass pass;
  std::vector<Rational> current(net.layer_sizes.front());
  for (std::size_t j = 0; j < current.size(); ++j) {
    current[j] = (x.values.at(j) - net.input_offset.at(j)) * net.input_scale.at(j);
  }
  pass.outputs.push_back(current);
  const std::size_t layers = net.weights.size();
  for (std::size_t i = 0; i < layers; ++i) {
    std::vector<Rational> in(net.layer_sizes[i + 1]);
    for (std::size_t l = 0; l < in.size(); ++l) {
      Rational sum = net.biases[i][l];
      for (std::size_t j = 0; j < current.size(); ++j) sum += net.weights[i][j][l] * current[j];
      in[l] = sum;
    }
    pass.pre_activations.push_back(in);
    if (i + 1 < layers) {
      for (auto& v : in) {
        if (v < 0) v = 0;
      }
      pass.outputs.push_back(in);
    }
    current = std::move(in);
  }
  const auto& logits = pass.pre_activations.back();
  if (net.mode == MlpSurrogate::Mode::argmax) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c) {
      if (logits[c] > logits[best] || (logits[c] == logits[best] && net.class_codes[c] < net.class_codes[best])) {
        best = c;
      }
    }
    pass.prediction.classes = {net.class_codes[best]};
  } else {
    for (const auto& v : logits) pass.prediction.classes.push_back(v >= net.threshold ? 1 : 0);
  }
  return pass;
}

namespace {

/// Dense float network used during training only.
struct FloatNet {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> w;  // w[i][j * out + l]
  std::vector<std::vector<double>> b;

  std::size_t layers() const { return w.size(); }

  /// Returns activations per layer (acts[0] = input, acts.back() = logits).
  std::vector<std::vector<double>> forward(const std::vector<double>& input) const {
    std::vector<std::vector<double>> acts{input};
    for (std::size_t i = 0; i < layers(); ++i) {
      const auto& prev = acts.back();
      std::vector<double> next(sizes[i + 1]);
      for (std::size_t l = 0; l < next.size(); ++l) {
        double s = b[i][l];
        for (std::size_t j = 0; j < prev.size(); ++j) s += w[i][j * next.size() + l] * prev[j];
        next[l] = (i + 1 < layers()) ? std::max(0.0, s) : s;
      }
      acts.push_back(std::move(next));
    }
    return acts;
  }
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double micro_f1(const std::vector<std::vector<double>>& logits, const std::vector<std::vector<double>>& targets,
                double th) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t r = 0; r < logits.size(); ++r) {
    for (std::size_t l = 0; l < logits[r].size(); ++l) {
      bool predicted = logits[r][l] >= th;
      bool actual = targets[r][l] > 0.5;
      tp += predicted && actual;
      fp += predicted && !actual;
      fn += !predicted && actual;
    }
  }
  double denom = 2 * tp + fp + fn;
  return denom == 0 ? 1.0 : 2 * tp / denom;
}

}  // namespace

MlpSurrogate train_mlp(const LabeledSet& data, const DatasetSchema& schema, const MlpParams& params) {
  if (data.empty()) throw Error("cannot train a network on empty data");
  if (params.epochs == 0 || params.batch_size == 0) throw Error("network parameters must be positive");
  for (auto h : params.hidden) {
    if (h == 0) throw Error("hidden layer sizes must be positive");
  }

  MlpSurrogate net;
  net.mode = schema.multilabel() ? MlpSurrogate::Mode::threshold : MlpSurrogate::Mode::argmax;
  if (net.mode == MlpSurrogate::Mode::argmax) net.class_codes = schema.label(0).classes;
  const std::size_t outputs = net.mode == MlpSurrogate::Mode::argmax ? net.class_codes.size() : schema.l_size();
  net.layer_sizes.push_back(schema.f_size());
  for (auto h : params.hidden) net.layer_sizes.push_back(h);
  net.layer_sizes.push_back(outputs);
  set_input_scaling(net, schema);

  // Training inputs and targets.
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  for (const auto& row : data.rows()) {
    std::vector<double> in(schema.f_size());
    for (std::size_t j = 0; j < in.size(); ++j) {
      in[j] = to_double((row.x.values[j] - net.input_offset[j]) * net.input_scale[j]);
    }
    inputs.push_back(std::move(in));
    std::vector<double> t(outputs, 0.0);
    if (net.mode == MlpSurrogate::Mode::argmax) {
      auto it = std::find(net.class_codes.begin(), net.class_codes.end(), row.y.classes[0]);
      t[static_cast<std::size_t>(it - net.class_codes.begin())] = 1.0;
    } else {
      for (std::size_t l = 0; l < outputs; ++l) t[l] = row.y.classes[l] == 1 ? 1.0 : 0.0;
    }
    targets.push_back(std::move(t));
  }

  Rng rng(params.seed);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  FloatNet f;
  f.sizes = net.layer_sizes;
  for (std::size_t i = 0; i + 1 < f.sizes.size(); ++i) {
    f.w.emplace_back(f.sizes[i] * f.sizes[i + 1]);
    for (auto& v : f.w.back()) v = init(rng);
    f.b.emplace_back(f.sizes[i + 1]);
    for (auto& v : f.b.back()) v = init(rng);
  }
  auto vw = f.w;
  auto vb = f.b;
  for (auto& v : vw) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : vb) std::fill(v.begin(), v.end(), 0.0);

  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t L = f.layers();
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      std::size_t end = std::min(order.size(), start + params.batch_size);
      auto gw = f.w;
      auto gb = f.b;
      for (auto& v : gw) std::fill(v.begin(), v.end(), 0.0);
      for (auto& v : gb) std::fill(v.begin(), v.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& in = inputs[order[k]];
        const auto& target = targets[order[k]];
        auto acts = f.forward(in);
        std::vector<double> delta(outputs);
        const auto& logits = acts.back();
        if (net.mode == MlpSurrogate::Mode::argmax) {
          double mx = *std::max_element(logits.begin(), logits.end());
          double z = 0;
          for (double v : logits) z += std::exp(v - mx);
          for (std::size_t c = 0; c < outputs; ++c) delta[c] = std::exp(logits[c] - mx) / z - target[c];
        } else {
          for (std::size_t c = 0; c < outputs; ++c) delta[c] = sigmoid(logits[c]) - target[c];
        }
        for (std::size_t i = L; i-- > 0;) {
          const auto& prev = acts[i];
          const std::size_t out = f.sizes[i + 1];
          for (std::size_t l = 0; l < out; ++l) {
            gb[i][l] += delta[l];
            for (std::size_t j = 0; j < prev.size(); ++j) gw[i][j * out + l] += delta[l] * prev[j];
          }
          if (i == 0) break;
          std::vector<double> back(prev.size(), 0.0);
          for (std::size_t j = 0; j < prev.size(); ++j) {
            if (prev[j] <= 0) continue;  // ReLU gradient
            double s = 0;
            for (std::size_t l = 0; l < out; ++l) s += f.w[i][j * out + l] * delta[l];
            back[j] = s;
          }
          delta = std::move(back);
        }
      }
      const double scale = params.learning_rate / static_cast<double>(end - start);
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t p = 0; p < f.w[i].size(); ++p) {
          vw[i][p] = params.momentum * vw[i][p] - scale * gw[i][p];
          f.w[i][p] += vw[i][p];
        }
        for (std::size_t p = 0; p < f.b[i].size(); ++p) {
          vb[i][p] = params.momentum * vb[i][p] - scale * gb[i][p];
          f.b[i][p] += vb[i][p];
        }
      }
    }
    for (auto& layer : f.w) {
      for (auto& v : layer) v = std::clamp(v, -10.0, 10.0);
    }
    for (auto& layer : f.b) {
      for (auto& v : layer) v = std::clamp(v, -10.0, 10.0);
    }
  }

  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t out = f.sizes[i + 1];
    net.weights.emplace_back(f.sizes[i], std::vector<Rational>(out));
    for (std::size_t j = 0; j < f.sizes[i]; ++j) {
      for (std::size_t l = 0; l < out; ++l) {
        net.weights[i][j][l] = quantize(f.w[i][j * out + l]);
        f.w[i][j * out + l] = to_double(net.weights[i][j][l]);
      }
    }
    net.biases.emplace_back(out);
    for (std::size_t l = 0; l < out; ++l) {
      net.biases[i][l] = quantize(f.b[i][l]);
      f.b[i][l] = to_double(net.biases[i][l]);
    }
  }

  if (net.mode == MlpSurrogate::Mode::threshold) {
    // The decision threshold maximizes micro-F1 of the quantized network on
    // the training data; 0 wins ties.
    std::vector<std::vector<double>> logits;
    std::vector<double> candidates;
    for (const auto& in : inputs) {
      logits.push_back(f.forward(in).back());
      candidates.insert(candidates.end(), logits.back().begin(), logits.back().end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    double best_th = 0;
    double best_f1 = micro_f1(logits, targets, 0);
    for (std::size_t k = 0; k + 1 < candidates.size(); ++k) {
      double th = std::clamp((candidates[k] + candidates[k + 1]) / 2, -10.0, 10.0);
      double score = micro_f1(logits, targets, to_double(quantize(th)));
      if (score > best_f1) {
        best_f1 = score;
        best_th = th;
      }
    }
    net.threshold = quantize(best_th);
  }
  return net;
}

}  // namespace mlcheck
