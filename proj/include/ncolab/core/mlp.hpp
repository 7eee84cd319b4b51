#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncolab/core/error.hpp"
#include "ncolab/core/tape.hpp"

namespace ncolab::core {

/// Hidden-layer nonlinearity. The last layer of every network is affine.
enum class Activation { Tanh, Relu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Dense feed-forward network parameters.
struct MlpParams {
  std::vector<Layer> layers;
  Activation activation = Activation::Tanh;

  int in_dim() const;
  int out_dim() const;
  std::size_t num_params() const;

  /// Layer widths including input and output: {in, h1, ..., out}.
  std::vector<int> widths() const;

  /// Throws DimensionError when consecutive layers do not chain and
  /// NumericalError when any entry is non-finite.
  void validate() const;
};

/// Elementwise tanh as sign(x) (1 - e^{-2|x|}) / (1 + e^{-2|x|}), which uses
/// Eigen's vectorized exp. Agrees with std::tanh to a few ulps.
Eigen::ArrayXXd tanh_array(const Eigen::ArrayXXd& x);

/// Glorot-uniform weights, zero biases.
MlpParams make_mlp(const std::vector<int>& widths, Activation activation,
                   std::mt19937_64& rng);

/// Number of parameters of an MLP with the given widths.
std::size_t mlp_param_count(const std::vector<int>& widths);

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x);

/// Intermediate values kept by the batched forward pass for backprop.
/// inputs[k] is the input of layer k (one column per sample); preacts[k] is
/// W_k * inputs[k] + b_k.
struct MlpCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> preacts;
};

/// Forward pass on a batch stored column-wise (in x batch).
Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& x,
                                  MlpCache* cache = nullptr);

/// Backprop of dL/d(output) through a cached forward pass. Accumulates into
/// grads (same shapes as params) and returns dL/d(input).
Eigen::MatrixXd mlp_backward_batch(const MlpParams& params, const MlpCache& cache,
                                   const Eigen::MatrixXd& d_out, MlpParams& grads);

/// Zero-valued parameter set with the shapes of params.
MlpParams zeros_like(const MlpParams& params);

/// Parameters in storage order: per layer, weight (column-major) then bias.
void append_flat(const MlpParams& params, std::vector<double>& out);
std::size_t assign_flat(MlpParams& params, std::span<const double> flat);

/// Forward pass over any scalar type (double or tape Var) reading weights
/// from a flat parameter span in `append_flat` order. Used where gradients
/// with respect to network weights are taken on the tape.
template <class T>
std::vector<T> mlp_forward_generic(const std::vector<int>& widths, Activation activation,
                                   std::span<const T> flat, std::span<const T> x) {
  if (static_cast<int>(x.size()) != widths.front()) {
    throw DimensionError("mlp input has length " + std::to_string(x.size()) +
                         ", layer 0 expects " + std::to_string(widths.front()));
  }
  std::vector<T> cur(x.begin(), x.end());
  std::size_t offset = 0;
  const std::size_t n_layers = widths.size() - 1;
  for (std::size_t k = 0; k < n_layers; ++k) {
    const int in = widths[k];
    const int out = widths[k + 1];
    const std::size_t w_off = offset;
    const std::size_t b_off = offset + static_cast<std::size_t>(in) * out;
    offset = b_off + static_cast<std::size_t>(out);
    std::vector<T> next;
    next.reserve(static_cast<std::size_t>(out));
    for (int r = 0; r < out; ++r) {
      T acc = flat[b_off + static_cast<std::size_t>(r)];
      for (int c = 0; c < in; ++c) {
        acc = acc + flat[w_off + static_cast<std::size_t>(c) * out + r] * cur[c];
      }
      if (k + 1 < n_layers) {
        using std::tanh;
        acc = activation == Activation::Tanh ? tanh(acc) : relu(acc);
      }
      next.push_back(acc);
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace ncolab::core
