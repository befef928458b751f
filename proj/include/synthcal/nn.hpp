#pragma once

// Small fully-connected networks with hand-written backprop. Shared by the
// CVAE generator, the weight policy and the utility classifier.

#include "synthcal/common.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace synthcal::nn {

enum class Activation { identity, tanh, relu, sigmoid };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "identity";
}

inline Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ConfigError("unknown activation '" + name + "'");
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

inline Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp();
  return e / e.sum();
}

inline Vector log_softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return logits.array() - lse;
}

struct Layer {
  Matrix weights;  // out x in
  Vector bias;
  Activation activation = Activation::identity;

  Eigen::Index fan_in() const { return weights.cols(); }
  Eigen::Index fan_out() const { return weights.rows(); }
};

struct Mlp {
  std::vector<Layer> layers;

  Eigen::Index input_size() const { return layers.front().fan_in(); }
  Eigen::Index output_size() const { return layers.back().fan_out(); }

  std::vector<Eigen::Index> layer_sizes() const {
    std::vector<Eigen::Index> sizes{input_size()};
    for (const auto& l : layers) sizes.push_back(l.fan_out());
    return sizes;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers)
      if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }

  /// Glorot-uniform weights, zero biases. activations[k] applies after layer k.
  static Mlp create(const std::vector<Eigen::Index>& sizes, const std::vector<Activation>& activations, Rng& rng) {
    if (sizes.size() < 2 || activations.size() != sizes.size() - 1)
      throw std::invalid_argument("Mlp::create: need n+1 sizes for n activations");
    Mlp net;
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
      Layer layer;
      layer.activation = activations[k];
      layer.weights.resize(sizes[k + 1], sizes[k]);
      layer.bias = Vector::Zero(sizes[k + 1]);
      const double limit = std::sqrt(6.0 / static_cast<double>(sizes[k] + sizes[k + 1]));
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
      net.layers.push_back(std::move(layer));
    }
    return net;
  }
};

/// Activations recorded by forward(); inputs[k] feeds layer k, outputs[k] leaves it.
struct Cache {
  std::vector<Matrix> inputs;
  std::vector<Matrix> outputs;
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
  Matrix input;  // dL/d(network input), batch x in

  static Gradients zeros_like(const Mlp& net) {
    Gradients g;
    for (const auto& l : net.layers) {
      g.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      g.bias.push_back(Vector::Zero(l.bias.size()));
    }
    return g;
  }

  bool all_finite() const {
    for (std::size_t k = 0; k < weights.size(); ++k)
      if (!weights[k].allFinite() || !bias[k].allFinite()) return false;
    return true;
  }

  Gradients& operator*=(double s) {
    for (auto& w : weights) w *= s;
    for (auto& b : bias) b *= s;
    input *= s;
    return *this;
  }
};

namespace detail {

inline Matrix activate(const Matrix& z, Activation a) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::sigmoid: return z.unaryExpr([](double v) { return sigmoid(v); });
  }
  return z;
}

// Derivative expressed through the activation output y.
inline Matrix activation_grad(const Matrix& y, Activation a) {
  switch (a) {
    case Activation::identity: return Matrix::Ones(y.rows(), y.cols());
    case Activation::tanh: return (1.0 - y.array().square()).matrix();
    case Activation::relu: return (y.array() > 0.0).cast<double>().matrix();
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
  }
  return Matrix::Ones(y.rows(), y.cols());
}

}  // namespace detail

/// Batched forward pass; each row of `input` is one example.
inline Matrix forward(const Mlp& net, const Matrix& input, Cache* cache = nullptr) {
  if (net.layers.empty()) throw std::invalid_argument("forward: empty network");
  if (input.cols() != net.input_size())
    throw std::invalid_argument("forward: input width " + std::to_string(input.cols()) + ", network expects " +
                                std::to_string(net.input_size()));
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Matrix a = input;
  for (const auto& layer : net.layers) {
    Matrix z = (a * layer.weights.transpose()).rowwise() + layer.bias.transpose();
    Matrix y = detail::activate(z, layer.activation);
    if (cache) {
      cache->inputs.push_back(std::move(a));
      cache->outputs.push_back(y);
    }
    a = std::move(y);
  }
  return a;
}

inline Vector forward(const Mlp& net, const Vector& input) {
  Matrix row = input.transpose();
  return forward(net, row).row(0).transpose();
}

/// Gradients of a loss summed over the batch, given dL/d(output).
inline Gradients backward(const Mlp& net, const Cache& cache, const Matrix& output_grad) {
  if (cache.inputs.size() != net.layers.size() || cache.outputs.size() != net.layers.size())
    throw std::invalid_argument("backward: cache does not match network depth");
  for (std::size_t k = 0; k < net.layers.size(); ++k)
    if (cache.inputs[k].cols() != net.layers[k].fan_in() || cache.outputs[k].cols() != net.layers[k].fan_out())
      throw std::invalid_argument("backward: cache does not match layer " + std::to_string(k));
  if (output_grad.rows() != cache.outputs.back().rows() || output_grad.cols() != net.output_size())
    throw std::invalid_argument("backward: output gradient shape mismatch");

  Gradients g = Gradients::zeros_like(net);
  Matrix upstream = output_grad;
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const auto& layer = net.layers[k];
    Matrix delta = upstream.cwiseProduct(detail::activation_grad(cache.outputs[k], layer.activation));
    g.weights[k] = delta.transpose() * cache.inputs[k];
    g.bias[k] = delta.colwise().sum().transpose();
    upstream = delta * layer.weights;
  }
  g.input = std::move(upstream);
  return g;
}

// ---------------------------------------------------------------------------
// Optimizers

enum class Method { sgd, momentum, adam };
enum class Direction { descent, ascent };

struct OptimizerConfig {
  Method method = Method::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;  // also the momentum coefficient
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Optimizer {
 public:
  Optimizer() = default;
  explicit Optimizer(OptimizerConfig config) : config_(config) {
    if (!(config_.learning_rate > 0)) throw ConfigError("learning rate must be positive");
  }

  const OptimizerConfig& config() const { return config_; }

  /// Applies one update in place. Throws DivergenceError and leaves the
  /// network untouched if any gradient entry is non-finite.
  void step(Mlp& net, const Gradients& grads, Direction dir = Direction::descent) {
    if (!grads.all_finite()) throw DivergenceError("non-finite gradient; optimizer step rejected");
    if (grads.weights.size() != net.layers.size()) throw std::invalid_argument("step: gradient depth mismatch");
    if (first_.weights.empty()) {
      first_ = Gradients::zeros_like(net);
      second_ = Gradients::zeros_like(net);
    }
    ++t_;
    const double sign = dir == Direction::ascent ? 1.0 : -1.0;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
      update(net.layers[k].weights, grads.weights[k], first_.weights[k], second_.weights[k], sign);
      update(net.layers[k].bias, grads.bias[k], first_.bias[k], second_.bias[k], sign);
    }
  }

 private:
  template <class P, class G>
  void update(P& param, const G& grad, G& m, G& v, double sign) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols())
      throw std::invalid_argument("step: gradient shape mismatch");
    const double lr = config_.learning_rate;
    switch (config_.method) {
      case Method::sgd:
        param += sign * lr * grad;
        break;
      case Method::momentum:
        m = config_.beta1 * m + grad;
        param += sign * lr * m;
        break;
      case Method::adam: {
        m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
        v = config_.beta2 * v + (1.0 - config_.beta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
        param.array() += sign * lr * (m.array() / c1) / ((v.array() / c2).sqrt() + config_.epsilon);
        break;
      }
    }
  }

  OptimizerConfig config_;
  Gradients first_;
  Gradients second_;
  long t_ = 0;
};

// ---------------------------------------------------------------------------
// Flat parameter access (gradient checking, serialization)

inline std::vector<double> flatten(const Mlp& net) {
  std::vector<double> out;
  out.reserve(net.parameter_count());
  for (const auto& l : net.layers) {
    out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

inline std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  for (std::size_t k = 0; k < g.weights.size(); ++k) {
    out.insert(out.end(), g.weights[k].data(), g.weights[k].data() + g.weights[k].size());
    out.insert(out.end(), g.bias[k].data(), g.bias[k].data() + g.bias[k].size());
  }
  return out;
}

inline void unflatten(Mlp& net, const std::vector<double>& flat) {
  if (flat.size() != net.parameter_count()) throw std::invalid_argument("unflatten: parameter count mismatch");
  std::size_t pos = 0;
  for (auto& l : net.layers) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(), l.weights.data());
    pos += static_cast<std::size_t>(l.weights.size());
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.data());
    pos += static_cast<std::size_t>(l.bias.size());
  }
}

inline double& parameter_at(Mlp& net, std::size_t index) {
  for (auto& l : net.layers) {
    if (index < static_cast<std::size_t>(l.weights.size())) return l.weights.data()[index];
    index -= static_cast<std::size_t>(l.weights.size());
    if (index < static_cast<std::size_t>(l.bias.size())) return l.bias.data()[index];
    index -= static_cast<std::size_t>(l.bias.size());
  }
  throw std::out_of_range("parameter_at");
}

inline nlohmann::json to_json(const Mlp& net) {
  nlohmann::json j;
  j["layer_sizes"] = net.layer_sizes();
  auto& acts = j["activations"] = nlohmann::json::array();
  for (const auto& l : net.layers) acts.push_back(to_string(l.activation));
  j["parameters"] = flatten(net);
  return j;
}

inline Mlp from_json(const nlohmann::json& j) {
  const auto sizes = j.at("layer_sizes").get<std::vector<Eigen::Index>>();
  std::vector<Activation> acts;
  for (const auto& a : j.at("activations")) acts.push_back(parse_activation(a.get<std::string>()));
  Rng unused(0);
  Mlp net = Mlp::create(sizes, acts, unused);
  unflatten(net, j.at("parameters").get<std::vector<double>>());
  return net;
}

}  // namespace synthcal::nn
