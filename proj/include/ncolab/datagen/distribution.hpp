#pragma once

#include <random>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ncolab/envs/env.hpp"

namespace ncolab::datagen {

enum class DistLabel { ID, OOD, OOD1, OOD2, OOD3 };

std::string to_string(DistLabel l);
DistLabel dist_label_from_string(const std::string& s);

/// Coordinatewise uniform noise box [lo, hi].
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box uniform(int n, double lo, double hi);
  int size() const { return static_cast<int>(lo.size()); }
  void validate(const std::string& what) const;
};

/// Instance sampler around a base instance.
///
/// x_goal = base + eps_goal. In "more variables" mode the dynamics constants
/// are scaled by (1 + eps_const) and x_init = base + eps_init. Brachistochrone
/// always varies its start height through the x_init box. tf ~ U(tf_lo, tf_hi).
struct DistributionSpec {
  envs::OcpInstance base;
  DistLabel label = DistLabel::ID;
  Box goal;
  bool more_variables = false;
  Box constants;
  Box x_init;
  double tf_lo = 1.0;
  double tf_hi = 1.01;

  bool varies_x_init() const;
  void validate() const;
};

/// Preset boxes: ID base + U(-0.5, 0.5), OOD base + U(-0.7, -0.5), OOD1..3
/// base + U(-1.0, -0.8), U(-1.3, -1.1), U(-1.6, -1.4) on every goal
/// coordinate. Constants (more variables): ID U(-0.2, 0.2), shifted labels
/// U(-0.3, -0.2), relative. Brachistochrone: ID y1 ~ U(2, 3), y2 ~ U(1, 2);
/// OOD y1 ~ U(2.9, 3.8), y2 ~ U(1.9, 2.8), fixed tf = x2 - x1.
DistributionSpec make_distribution(envs::EnvId env, DistLabel label, bool more_variables = false);

envs::OcpInstance sample_instance(const DistributionSpec& dist, std::mt19937_64& rng);

nlohmann::json distribution_to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const nlohmann::json& j);

}  // namespace ncolab::datagen
