/*
 * Copyright 2026 The rulehound Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Small dense feed-forward networks: forward/backward passes, Adam, and a
// minibatch cross-entropy trainer. Samples are stored column-wise.

#ifndef RULEHOUND_MLP_HPP_
#define RULEHOUND_MLP_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rulehound/dataset.hpp"
#include "rulehound/error.hpp"
#include "rulehound/oracle.hpp"

namespace rulehound {

enum class Activation { kIdentity, kTanh, kSigmoid, kRelu };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kRelu: return "relu";
  }
  return "identity";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::kIdentity;
  if (s == "tanh") return Activation::kTanh;
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "relu") return Activation::kRelu;
  throw ParseError("unknown activation '" + s + "'");
}

namespace detail {

inline void apply(Activation a, Eigen::MatrixXd& m) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kTanh: m = m.array().tanh(); break;
    case Activation::kSigmoid: m = (1.0 + (-m.array()).exp()).inverse(); break;
    case Activation::kRelu: m = m.array().max(0.0); break;
  }
}

// Derivative expressed through the activation output.
inline Eigen::MatrixXd derivative(Activation a, const Eigen::MatrixXd& out) {
  switch (a) {
    case Activation::kIdentity: return Eigen::MatrixXd::Ones(out.rows(), out.cols());
    case Activation::kTanh: return 1.0 - out.array().square();
    case Activation::kSigmoid: return out.array() * (1.0 - out.array());
    case Activation::kRelu: return (out.array() > 0.0).cast<double>();
  }
  return Eigen::MatrixXd::Ones(out.rows(), out.cols());
}

}  // namespace detail

struct Layer {
  Eigen::MatrixXd weight;  // outputs x inputs
  Eigen::VectorXd bias;
  Activation activation = Activation::kIdentity;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
};

class Mlp {
 public:
  // Activations of every layer, input first. Filled by forward_batch.
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() = default;

  // Glorot-uniform weights, zero biases. `activations` has one entry per
  // weight layer (sizes.size() - 1).
  Mlp(const std::vector<std::size_t>& sizes,
      const std::vector<Activation>& activations, std::uint64_t seed)
      : seed_(seed) {
    shape(sizes, activations);
    std::mt19937_64 rng(seed);
    for (auto& layer : layers_) {
      const double limit = std::sqrt(
          6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
          layer.weight(r, c) = u(rng);
        }
      }
    }
  }

  static Mlp zeros(const std::vector<std::size_t>& sizes,
                   const std::vector<Activation>& activations) {
    Mlp m;
    m.shape(sizes, activations);
    return m;
  }

  std::size_t input_size() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
  }
  std::size_t output_size() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
  }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t s) { seed_ = s; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s;
    if (layers_.empty()) return s;
    s.push_back(input_size());
    for (const auto& l : layers_) s.push_back(static_cast<std::size_t>(l.weight.rows()));
    return s;
  }

  std::vector<Activation> activations() const {
    std::vector<Activation> a;
    for (const auto& l : layers_) a.push_back(l.activation);
    return a;
  }

  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const {
    check_input(static_cast<std::size_t>(x.rows()));
    Eigen::MatrixXd a = x;
    for (const auto& l : layers_) {
      Eigen::MatrixXd z = (l.weight * a).colwise() + l.bias;
      detail::apply(l.activation, z);
      a = std::move(z);
    }
    return a;
  }

  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, Cache& cache) const {
    check_input(static_cast<std::size_t>(x.rows()));
    cache.activations.clear();
    cache.activations.push_back(x);
    for (const auto& l : layers_) {
      Eigen::MatrixXd z = (l.weight * cache.activations.back()).colwise() + l.bias;
      detail::apply(l.activation, z);
      cache.activations.push_back(std::move(z));
    }
    return cache.activations.back();
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    return forward_batch(x);
  }

  std::vector<double> forward(std::span<const double> x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i];
    const Eigen::VectorXd y = forward(v);
    return {y.data(), y.data() + y.size()};
  }

  // `d_output` is dLoss/dOutput (post-activation) for the cached batch.
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& d_output) const {
    Gradients g;
    g.weight.resize(layers_.size());
    g.bias.resize(layers_.size());
    Eigen::MatrixXd upstream = d_output;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      const Eigen::MatrixXd delta =
          upstream.array() *
          detail::derivative(layers_[k].activation, cache.activations[k + 1]).array();
      g.weight[k] = delta * cache.activations[k].transpose();
      g.bias[k] = delta.rowwise().sum();
      if (k > 0) upstream = layers_[k].weight.transpose() * delta;
    }
    return g;
  }

  // Row-major weights then bias, layer by layer.
  std::vector<double> parameters() const {
    std::vector<double> p;
    for (const auto& l : layers_) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) p.push_back(l.weight(r, c));
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) p.push_back(l.bias(r));
    }
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) {
      throw StructuralError("parameter vector has " + std::to_string(p.size()) +
                            " entries, network needs " +
                            std::to_string(parameter_count()));
    }
    std::size_t i = 0;
    for (auto& l : layers_) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = p[i++];
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = p[i++];
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) {
      n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    }
    return n;
  }

  bool finite() const {
    for (const auto& l : layers_) {
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

 private:
  void shape(const std::vector<std::size_t>& sizes,
             const std::vector<Activation>& activations) {
    if (sizes.size() < 2) throw StructuralError("an MLP needs at least two layer sizes");
    if (activations.size() != sizes.size() - 1) {
      throw StructuralError("one activation per weight layer is required");
    }
    layers_.clear();
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
      if (sizes[k] == 0 || sizes[k + 1] == 0) throw StructuralError("empty layer");
      Layer l;
      l.weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sizes[k + 1]),
                                       static_cast<Eigen::Index>(sizes[k]));
      l.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sizes[k + 1]));
      l.activation = activations[k];
      layers_.push_back(std::move(l));
    }
  }

  void check_input(std::size_t rows) const {
    if (rows != input_size()) {
      throw StructuralError("input has " + std::to_string(rows) +
                            " features, network expects " +
                            std::to_string(input_size()));
    }
  }

  std::vector<Layer> layers_;
  std::uint64_t seed_ = 0;
};

class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void set_learning_rate(double lr) { lr_ = lr; }
  double learning_rate() const { return lr_; }

  void step(Mlp& net, const Gradients& g) {
    auto& layers = net.layers();
    if (m_w_.size() != layers.size()) reset(net);
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < layers.size(); ++k) {
      m_w_[k] = beta1_ * m_w_[k] + (1.0 - beta1_) * g.weight[k];
      v_w_[k] = beta2_ * v_w_[k] + (1.0 - beta2_) * g.weight[k].array().square().matrix();
      m_b_[k] = beta1_ * m_b_[k] + (1.0 - beta1_) * g.bias[k];
      v_b_[k] = beta2_ * v_b_[k] + (1.0 - beta2_) * g.bias[k].array().square().matrix();
      layers[k].weight.array() -=
          lr_ * (m_w_[k].array() / c1) / ((v_w_[k].array() / c2).sqrt() + eps_);
      layers[k].bias.array() -=
          lr_ * (m_b_[k].array() / c1) / ((v_b_[k].array() / c2).sqrt() + eps_);
    }
  }

 private:
  void reset(const Mlp& net) {
    m_w_.clear();
    v_w_.clear();
    m_b_.clear();
    v_b_.clear();
    for (const auto& l : net.layers()) {
      m_w_.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      v_w_.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      m_b_.push_back(Eigen::VectorXd::Zero(l.bias.size()));
      v_b_.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
    t_ = 0;
  }

  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
};

// Mean softmax cross-entropy of `logits` (classes x batch) and its gradient
// with respect to the logits.
inline double softmax_cross_entropy(const Eigen::MatrixXd& logits,
                                    std::span<const std::size_t> labels,
                                    Eigen::MatrixXd* d_logits) {
  const auto n = logits.cols();
  double loss = 0.0;
  if (d_logits) d_logits->resize(logits.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd col = logits.col(j);
    const double peak = col.maxCoeff();
    const Eigen::VectorXd e = (col.array() - peak).exp();
    const double z = e.sum();
    const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(j)]);
    loss += -(col(y) - peak - std::log(z));
    if (d_logits) {
      d_logits->col(j) = e / z;
      (*d_logits)(y, j) -= 1.0;
    }
  }
  if (d_logits) *d_logits /= static_cast<double>(n);
  return loss / static_cast<double>(n);
}

// Maps raw states to network features: continuous states are min-max scaled
// to [0, 1] with ranges taken from the training data, discrete states with a
// small number of levels are one-hot encoded.
class FeatureEncoder {
 public:
  struct Field {
    StateKind kind = StateKind::kContinuous;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t levels = 0;  // > 0 means one-hot

    bool operator==(const Field&) const = default;
  };

  static constexpr std::size_t kMaxOneHot = 16;

  FeatureEncoder() = default;
  explicit FeatureEncoder(std::vector<Field> fields) : fields_(std::move(fields)) {}

  static FeatureEncoder fit(const Dataset& data) {
    const auto inputs = data.schema.of(Role::kInput);
    const auto ranges = data.state_ranges();
    std::vector<Field> fields;
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      Field f;
      f.kind = inputs[j]->kind;
      f.lo = ranges[j].first;
      f.hi = ranges[j].second;
      if (f.kind == StateKind::kDiscrete && f.lo >= 0.0) {
        const std::size_t levels =
            inputs[j]->categories.empty()
                ? static_cast<std::size_t>(f.hi) + 1
                : inputs[j]->categories.size();
        if (levels <= kMaxOneHot) f.levels = levels;
      }
      fields.push_back(f);
    }
    return FeatureEncoder(std::move(fields));
  }

  const std::vector<Field>& fields() const { return fields_; }

  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& f : fields_) w += f.levels > 0 ? f.levels : 1;
    return w;
  }

  void encode_into(std::span<const double> states, double* out) const {
    if (states.size() != fields_.size()) {
      throw StructuralError("encoder expects " + std::to_string(fields_.size()) +
                            " states, got " + std::to_string(states.size()));
    }
    for (std::size_t j = 0; j < fields_.size(); ++j) {
      const Field& f = fields_[j];
      if (f.levels > 0) {
        for (std::size_t k = 0; k < f.levels; ++k) out[k] = 0.0;
        const double v = std::round(states[j]);
        if (v >= 0.0 && v < static_cast<double>(f.levels)) {
          out[static_cast<std::size_t>(v)] = 1.0;
        }
        out += f.levels;
      } else {
        const double span = f.hi - f.lo;
        *out++ = span > 0.0 ? (states[j] - f.lo) / span : 0.0;
      }
    }
  }

  Eigen::VectorXd encode(std::span<const double> states) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(width()));
    encode_into(states, v.data());
    return v;
  }

  Eigen::MatrixXd encode_all(const std::vector<Sample>& samples) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(width()),
                      static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      encode_into(samples[i].states, m.col(static_cast<Eigen::Index>(i)).data());
    }
    return m;
  }

 private:
  std::vector<Field> fields_;
};

struct TrainConfig {
  std::size_t epochs = 400;
  std::size_t batch_size = 16;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
  // Training stops early once the epoch loss falls below this value.
  double target_loss = 1e-3;
};

struct TrainReport {
  std::vector<double> loss_curve;
  double train_accuracy = 0.0;
  std::size_t epochs_run = 0;
};

inline double classification_accuracy(const Mlp& net, const Eigen::MatrixXd& x,
                                      std::span<const std::size_t> labels) {
  const Eigen::MatrixXd out = net.forward_batch(x);
  std::size_t correct = 0;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    Eigen::Index best = 0;
    out.col(j).maxCoeff(&best);
    if (static_cast<std::size_t>(best) == labels[static_cast<std::size_t>(j)]) ++correct;
  }
  return out.cols() == 0 ? 0.0
                         : static_cast<double>(correct) / static_cast<double>(out.cols());
}

// Minibatch Adam on softmax cross-entropy. Sample order is reshuffled every
// epoch from `cfg.seed`, so a run is reproducible bit for bit.
inline TrainReport mlp_train(Mlp& net, const Eigen::MatrixXd& x,
                             const std::vector<std::size_t>& labels,
                             const TrainConfig& cfg) {
  if (x.cols() == 0 || static_cast<std::size_t>(x.cols()) != labels.size()) {
    throw ContractError("mlp_train: features and labels disagree");
  }
  for (std::size_t y : labels) {
    if (y >= net.output_size()) throw ContractError("mlp_train: label out of range");
  }
  TrainReport report;
  Adam opt(cfg.learning_rate);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);

  Mlp::Cache cache;
  Eigen::MatrixXd xb, d_logits;
  std::vector<std::size_t> yb;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      xb.resize(x.rows(), static_cast<Eigen::Index>(end - start));
      yb.clear();
      for (std::size_t k = start; k < end; ++k) {
        xb.col(static_cast<Eigen::Index>(k - start)) = x.col(static_cast<Eigen::Index>(order[k]));
        yb.push_back(labels[order[k]]);
      }
      const Eigen::MatrixXd logits = net.forward_batch(xb, cache);
      const double loss = softmax_cross_entropy(logits, yb, &d_logits);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
      }
      epoch_loss += loss * static_cast<double>(end - start);
      opt.step(net, net.backward(cache, d_logits));
    }
    epoch_loss /= static_cast<double>(order.size());
    report.loss_curve.push_back(epoch_loss);
    report.epochs_run = epoch + 1;
    if (!net.finite()) throw TrainingError("parameters diverged");
    if (epoch_loss < cfg.target_loss) break;
  }
  report.train_accuracy = classification_accuracy(net, x, labels);
  return report;
}

// Classifier oracle: predicts the argmax class of a network over encoded
// raw states.
class MlpClassifier final : public OracleModel {
 public:
  MlpClassifier() = default;
  MlpClassifier(Mlp net, FeatureEncoder encoder)
      : net_(std::move(net)), encoder_(std::move(encoder)) {}

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const FeatureEncoder& encoder() const { return encoder_; }

  std::vector<double> scores(std::span<const double> states) const {
    const Eigen::VectorXd y = net_.forward(encoder_.encode(states));
    return {y.data(), y.data() + y.size()};
  }

  std::vector<double> predict(std::span<const double> states) const override {
    const auto s = scores(states);
    return {static_cast<double>(argmax(s))};
  }

 private:
  Mlp net_;
  FeatureEncoder encoder_;
};

inline std::size_t class_count(const Dataset& data) {
  const auto targets = data.schema.of(Role::kTarget);
  if (targets.size() != 1) {
    throw StructuralError("classification needs exactly one target column");
  }
  if (!targets[0]->categories.empty()) return targets[0]->categories.size();
  double hi = 0.0;
  for (const auto& s : data.samples) hi = std::max(hi, s.targets[0]);
  return static_cast<std::size_t>(hi) + 1;
}

struct ClassifierFit {
  MlpClassifier model;
  TrainReport report;
};

// Default classifier shape: [inputs, 16, 16, classes], tanh hidden units.
inline ClassifierFit train_classifier(const Dataset& data, const TrainConfig& cfg,
                                      std::vector<std::size_t> hidden = {16, 16}) {
  if (data.empty()) throw ContractError("train_classifier: empty dataset");
  FeatureEncoder enc = FeatureEncoder::fit(data);
  std::vector<std::size_t> sizes{enc.width()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(class_count(data));
  std::vector<Activation> acts(hidden.size(), Activation::kTanh);
  acts.push_back(Activation::kIdentity);
  Mlp net(sizes, acts, cfg.seed);

  std::vector<std::size_t> labels;
  labels.reserve(data.size());
  for (const auto& s : data.samples) {
    if (s.targets[0] < 0.0) throw ContractError("negative class label");
    labels.push_back(static_cast<std::size_t>(s.targets[0]));
  }
  TrainReport report = mlp_train(net, enc.encode_all(data.samples), labels, cfg);
  return {MlpClassifier(std::move(net), std::move(enc)), std::move(report)};
}

}  // namespace rulehound

#endif  // RULEHOUND_MLP_HPP_
