#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ncolab/envs/env.hpp"

namespace ncolab::op {

/// Selection and affine normalization of instance fields, e = (raw - shift) / scale.
///
/// Raw features are x_goal, then (more_variables) the dynamics constants,
/// then x_init when more_variables is set or the environment is
/// Brachistochrone (whose start height lives in x_init).
struct EncoderSpec {
  envs::EnvId env = envs::EnvId::Pendulum;
  bool more_variables = false;
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;

  int dim() const { return static_cast<int>(shift.size()); }
  void validate() const;
};

/// Number of raw features for an environment.
int feature_dim(envs::EnvId env, bool more_variables);

Eigen::VectorXd raw_features(const envs::OcpInstance& inst, bool more_variables);

/// Shift 0 and scale 1.
EncoderSpec identity_encoder(envs::EnvId env, bool more_variables);

/// Shift at the center and scale at the half-width of the per-feature range
/// of the training instances (scale 1 for constant features).
EncoderSpec fit_encoder(std::span<const envs::OcpInstance> train, bool more_variables);

/// Throws SchemaError when the instance does not match the spec.
Eigen::VectorXd encode_instance(const envs::OcpInstance& inst, const EncoderSpec& spec);

nlohmann::json encoder_to_json(const EncoderSpec& s);
EncoderSpec encoder_from_json(const nlohmann::json& j);

}  // namespace ncolab::op
