#include "ncolab/operator/encoder.hpp"

#include <cmath>

#include "ncolab/core/error.hpp"

namespace ncolab::op {

namespace {

bool uses_x_init(envs::EnvId env, bool more_variables) {
  return more_variables || env == envs::EnvId::Brachistochrone;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void EncoderSpec::validate() const {
  if (shift.size() != scale.size()) {
    throw SchemaError("encoder shift and scale differ in length");
  }
  if (dim() != feature_dim(env, more_variables)) {
    throw SchemaError("encoder for " + envs::to_string(env) + " needs " +
                      std::to_string(feature_dim(env, more_variables)) + " features, has " +
                      std::to_string(dim()));
  }
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    if (!std::isfinite(shift[i]) || !std::isfinite(scale[i]) || scale[i] == 0.0) {
      throw SchemaError("encoder feature " + std::to_string(i) +
                        " needs a finite shift and a finite non-zero scale");
    }
  }
}

int feature_dim(envs::EnvId env, bool more_variables) {
  const envs::EnvSpec spec = envs::make_env(env);
  int n = spec.d_x;
  if (more_variables) n += static_cast<int>(spec.constants.size());
  if (uses_x_init(env, more_variables)) n += spec.d_x;
  return n;
}

Eigen::VectorXd raw_features(const envs::OcpInstance& inst, bool more_variables) {
  std::vector<double> f = to_vector(inst.cost.x_goal);
  if (more_variables) {
    const auto c = to_vector(inst.env.constants);
    f.insert(f.end(), c.begin(), c.end());
  }
  if (uses_x_init(inst.env.id, more_variables)) {
    const auto x = to_vector(inst.x_init);
    f.insert(f.end(), x.begin(), x.end());
  }
  return from_vector(f);
}

EncoderSpec identity_encoder(envs::EnvId env, bool more_variables) {
  EncoderSpec s;
  s.env = env;
  s.more_variables = more_variables;
  const int n = feature_dim(env, more_variables);
  s.shift = Eigen::VectorXd::Zero(n);
  s.scale = Eigen::VectorXd::Ones(n);
  return s;
}

EncoderSpec fit_encoder(std::span<const envs::OcpInstance> train, bool more_variables) {
  if (train.empty()) throw ConfigError("cannot fit an encoder on zero instances");
  EncoderSpec s = identity_encoder(train.front().env.id, more_variables);
  Eigen::VectorXd lo = raw_features(train.front(), more_variables);
  Eigen::VectorXd hi = lo;
  for (const auto& inst : train) {
    if (inst.env.id != s.env) throw SchemaError("training instances mix environments");
    const Eigen::VectorXd f = raw_features(inst, more_variables);
    lo = lo.cwiseMin(f);
    hi = hi.cwiseMax(f);
  }
  s.shift = 0.5 * (lo + hi);
  s.scale = 0.5 * (hi - lo);
  for (Eigen::Index i = 0; i < s.scale.size(); ++i) {
    if (!(s.scale[i] > 1e-12)) s.scale[i] = 1.0;
  }
  s.validate();
  return s;
}

Eigen::VectorXd encode_instance(const envs::OcpInstance& inst, const EncoderSpec& spec) {
  if (inst.env.id != spec.env) {
    throw SchemaError("encoder is for " + envs::to_string(spec.env) + ", instance is " +
                      envs::to_string(inst.env.id));
  }
  const Eigen::VectorXd f = raw_features(inst, spec.more_variables);
  if (f.size() != spec.dim()) {
    throw SchemaError("instance provides " + std::to_string(f.size()) +
                      " encoder features, spec expects " + std::to_string(spec.dim()));
  }
  return ((f - spec.shift).array() / spec.scale.array()).matrix();
}

nlohmann::json encoder_to_json(const EncoderSpec& s) {
  return {{"env", envs::to_string(s.env)},
          {"more_variables", s.more_variables},
          {"shift", to_vector(s.shift)},
          {"scale", to_vector(s.scale)}};
}

EncoderSpec encoder_from_json(const nlohmann::json& j) {
  EncoderSpec s;
  try {
    s.env = envs::env_from_string(j.at("env").get<std::string>());
    s.more_variables = j.at("more_variables").get<bool>();
    s.shift = from_vector(j.at("shift").get<std::vector<double>>());
    s.scale = from_vector(j.at("scale").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("encoder spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace ncolab::op
