#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ncolab::core {

/// Adam moments plus the step-decay learning-rate schedule
/// lr(epoch) = lr0 * decay^floor(epoch / decay_period).
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
  double lr0 = 0.01;
  double decay = 0.9;
  std::int64_t decay_period = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(Eigen::Index n, double lr0, double decay,
                            std::int64_t decay_period);

  double learning_rate(std::int64_t epoch) const;

  /// In-place update. Entries with frozen[i] == true are left untouched,
  /// along with their moments.
  void apply(Eigen::VectorXd& params, const Eigen::VectorXd& grads, std::int64_t epoch,
             const std::vector<bool>* frozen = nullptr);
};

/// Pure form of one Adam update.
std::pair<Eigen::VectorXd, AdamState> adam_step(const AdamState& state,
                                                const Eigen::VectorXd& params,
                                                const Eigen::VectorXd& grads,
                                                std::int64_t epoch);

}  // namespace ncolab::core
