#include "ncolab/core/mlp.hpp"

#include "ncolab/core/tape.hpp"

namespace ncolab::core {

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  throw ConfigError("unknown activation '" + s + "'");
}

int MlpParams::in_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
}

int MlpParams::out_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
}

std::size_t MlpParams::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<int> MlpParams::widths() const {
  std::vector<int> w;
  if (layers.empty()) return w;
  w.push_back(in_dim());
  for (const auto& l : layers) w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

void MlpParams::validate() const {
  if (layers.empty()) throw DimensionError("mlp has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.bias.size() != l.weight.rows()) {
      throw DimensionError("layer " + std::to_string(k) + ": bias length " +
                           std::to_string(l.bias.size()) + " != weight rows " +
                           std::to_string(l.weight.rows()));
    }
    if (k + 1 < layers.size() && layers[k + 1].weight.cols() != l.weight.rows()) {
      throw DimensionError("layer " + std::to_string(k + 1) + " expects input " +
                           std::to_string(layers[k + 1].weight.cols()) + ", layer " +
                           std::to_string(k) + " produces " +
                           std::to_string(l.weight.rows()));
    }
    if (!l.weight.allFinite() || !l.bias.allFinite()) {
      throw NumericalError("layer " + std::to_string(k) + " has non-finite parameters");
    }
  }
}

MlpParams make_mlp(const std::vector<int>& widths, Activation activation,
                   std::mt19937_64& rng) {
  if (widths.size() < 2) throw DimensionError("mlp needs at least input and output widths");
  MlpParams p;
  p.activation = activation;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    const int in = widths[k];
    const int out = widths[k + 1];
    const double r = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-r, r);
    Layer l;
    l.weight.resize(out, in);
    for (Eigen::Index c = 0; c < in; ++c) {
      for (Eigen::Index rr = 0; rr < out; ++rr) l.weight(rr, c) = dist(rng);
    }
    l.bias = Eigen::VectorXd::Zero(out);
    p.layers.push_back(std::move(l));
  }
  return p;
}

std::size_t mlp_param_count(const std::vector<int>& widths) {
  std::size_t n = 0;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    n += static_cast<std::size_t>(widths[k] + 1) * static_cast<std::size_t>(widths[k + 1]);
  }
  return n;
}

Eigen::ArrayXXd tanh_array(const Eigen::ArrayXXd& x) {
  const Eigen::ArrayXXd e = (-2.0 * x.abs()).exp();
  return x.sign() * (1.0 - e) / (1.0 + e);
}

namespace {

void apply_activation(Activation a, Eigen::MatrixXd& m) {
  if (a == Activation::Tanh) {
    m = tanh_array(m.array()).matrix();
  } else {
    m = m.cwiseMax(0.0);
  }
}

}  // namespace

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x) {
  if (params.layers.empty()) throw DimensionError("mlp has no layers");
  if (x.size() != params.in_dim()) {
    throw DimensionError("mlp input has length " + std::to_string(x.size()) +
                         ", layer 0 expects " + std::to_string(params.in_dim()));
  }
  Eigen::MatrixXd cur = x;
  const std::size_t n = params.layers.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& l = params.layers[k];
    if (l.weight.cols() != cur.rows()) {
      throw DimensionError("layer " + std::to_string(k) + " expects input " +
                           std::to_string(l.weight.cols()) + ", got " +
                           std::to_string(cur.rows()));
    }
    Eigen::MatrixXd z = l.weight * cur;
    z.colwise() += l.bias;
    if (k + 1 < n) apply_activation(params.activation, z);
    cur = std::move(z);
  }
  return cur.col(0);
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& x,
                                  MlpCache* cache) {
  if (params.layers.empty()) throw DimensionError("mlp has no layers");
  if (x.rows() != params.in_dim()) {
    throw DimensionError("mlp input has " + std::to_string(x.rows()) +
                         " rows, layer 0 expects " + std::to_string(params.in_dim()));
  }
  const std::size_t n = params.layers.size();
  if (cache) {
    cache->inputs.resize(n);
    cache->preacts.resize(n);
  }
  Eigen::MatrixXd cur = x;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& l = params.layers[k];
    if (l.weight.cols() != cur.rows()) {
      throw DimensionError("layer " + std::to_string(k) + " expects input " +
                           std::to_string(l.weight.cols()) + ", got " +
                           std::to_string(cur.rows()));
    }
    Eigen::MatrixXd z = l.weight * cur;
    z.colwise() += l.bias;
    if (cache) {
      cache->inputs[k] = cur;
      cache->preacts[k] = z;
    }
    if (k + 1 < n) apply_activation(params.activation, z);
    cur = std::move(z);
  }
  return cur;
}

Eigen::MatrixXd mlp_backward_batch(const MlpParams& params, const MlpCache& cache,
                                   const Eigen::MatrixXd& d_out, MlpParams& grads) {
  const std::size_t n = params.layers.size();
  Eigen::MatrixXd delta = d_out;
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n) {
      const auto& z = cache.preacts[k];
      if (params.activation == Activation::Tanh) {
        delta.array() *= 1.0 - tanh_array(z.array()).square();
      } else {
        delta.array() *= (z.array() > 0.0).cast<double>();
      }
    }
    grads.layers[k].weight.noalias() += delta * cache.inputs[k].transpose();
    grads.layers[k].bias += delta.rowwise().sum();
    delta = params.layers[k].weight.transpose() * delta;
  }
  return delta;
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams z;
  z.activation = params.activation;
  for (const auto& l : params.layers) {
    z.layers.push_back(Layer{Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                             Eigen::VectorXd::Zero(l.bias.size())});
  }
  return z;
}

void append_flat(const MlpParams& params, std::vector<double>& out) {
  for (const auto& l : params.layers) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
}

std::size_t assign_flat(MlpParams& params, std::span<const double> flat) {
  std::size_t off = 0;
  for (auto& l : params.layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (off + nw + nb > flat.size()) {
      throw DimensionError("flat parameter vector too short for mlp");
    }
    std::copy_n(flat.data() + off, nw, l.weight.data());
    std::copy_n(flat.data() + off + nw, nb, l.bias.data());
    off += nw + nb;
  }
  return off;
}

}  // namespace ncolab::core
