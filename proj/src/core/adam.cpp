#include "ncolab/core/adam.hpp"

#include <cmath>
#include <string>

#include "ncolab/core/error.hpp"

namespace ncolab::core {

AdamState AdamState::for_size(Eigen::Index n, double lr0, double decay,
                              std::int64_t decay_period) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  s.lr0 = lr0;
  s.decay = decay;
  s.decay_period = decay_period;
  return s;
}

double AdamState::learning_rate(std::int64_t epoch) const {
  const auto periods = decay_period > 0 ? epoch / decay_period : 0;
  return lr0 * std::pow(decay, static_cast<double>(periods));
}

void AdamState::apply(Eigen::VectorXd& params, const Eigen::VectorXd& grads,
                      std::int64_t epoch, const std::vector<bool>* frozen) {
  if (params.size() != grads.size() || params.size() != m.size() ||
      params.size() != v.size()) {
    throw DimensionError("adam: params " + std::to_string(params.size()) + ", grads " +
                         std::to_string(grads.size()) + ", moments " +
                         std::to_string(m.size()));
  }
  if (frozen && frozen->size() != static_cast<std::size_t>(params.size())) {
    throw DimensionError("adam: freeze mask length mismatch");
  }
  ++step;
  const double lr = learning_rate(epoch);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    if (frozen && (*frozen)[static_cast<std::size_t>(i)]) continue;
    const double g = grads[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

std::pair<Eigen::VectorXd, AdamState> adam_step(const AdamState& state,
                                                const Eigen::VectorXd& params,
                                                const Eigen::VectorXd& grads,
                                                std::int64_t epoch) {
  AdamState next = state;
  Eigen::VectorXd p = params;
  next.apply(p, grads, epoch);
  return {std::move(p), std::move(next)};
}

}  // namespace ncolab::core
