#include "ncolab/datagen/distribution.hpp"

#include <cmath>
#include <vector>

#include "ncolab/core/error.hpp"

namespace ncolab::datagen {

std::string to_string(DistLabel l) {
  switch (l) {
    case DistLabel::ID: return "id";
    case DistLabel::OOD: return "ood";
    case DistLabel::OOD1: return "ood1";
    case DistLabel::OOD2: return "ood2";
    case DistLabel::OOD3: return "ood3";
  }
  return "id";
}

DistLabel dist_label_from_string(const std::string& s) {
  for (DistLabel l : {DistLabel::ID, DistLabel::OOD, DistLabel::OOD1, DistLabel::OOD2,
                      DistLabel::OOD3}) {
    if (to_string(l) == s) return l;
  }
  throw ConfigError("unknown distribution '" + s + "' (id, ood, ood1, ood2, ood3)");
}

Box Box::uniform(int n, double lo, double hi) {
  return Box{Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
}

void Box::validate(const std::string& what) const {
  if (lo.size() != hi.size()) throw ConfigError(what + " box bounds differ in length");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i]) {
      throw ConfigError(what + " box coordinate " + std::to_string(i) + " needs finite lo <= hi");
    }
  }
}

bool DistributionSpec::varies_x_init() const {
  return more_variables || base.env.id == envs::EnvId::Brachistochrone;
}

void DistributionSpec::validate() const {
  base.validate();
  goal.validate("goal");
  if (goal.size() != base.cost.x_goal.size()) {
    throw ConfigError("goal box has " + std::to_string(goal.size()) + " coordinates, x_goal has " +
                      std::to_string(base.cost.x_goal.size()));
  }
  if (more_variables) {
    constants.validate("constants");
    if (constants.size() != base.env.constants.size()) {
      throw ConfigError("constants box does not match the environment constants");
    }
  }
  if (varies_x_init()) {
    x_init.validate("x_init");
    if (x_init.size() != base.x_init.size()) {
      throw ConfigError("x_init box does not match x_init");
    }
  }
  if (!(tf_lo > 0.0) || !(tf_hi >= tf_lo) || !std::isfinite(tf_hi)) {
    throw ConfigError("tf range needs 0 < tf_lo <= tf_hi");
  }
}

namespace {

std::pair<double, double> shift_range(DistLabel l) {
  switch (l) {
    case DistLabel::ID: return {-0.5, 0.5};
    case DistLabel::OOD: return {-0.7, -0.5};
    case DistLabel::OOD1: return {-1.0, -0.8};
    case DistLabel::OOD2: return {-1.3, -1.1};
    case DistLabel::OOD3: return {-1.6, -1.4};
  }
  return {-0.5, 0.5};
}

Eigen::VectorXd draw(const Box& box, std::mt19937_64& rng) {
  Eigen::VectorXd out(box.size());
  for (int i = 0; i < box.size(); ++i) {
    out[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
  }
  return out;
}

std::vector<double> vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json box_json(const Box& b) { return {{"lo", vec(b.lo)}, {"hi", vec(b.hi)}}; }

Box box_from(const nlohmann::json& j) {
  return Box{from_vec(j.at("lo").get<std::vector<double>>()),
             from_vec(j.at("hi").get<std::vector<double>>())};
}

}  // namespace

DistributionSpec make_distribution(envs::EnvId env, DistLabel label, bool more_variables) {
  if (env == envs::EnvId::Zermelo) {
    throw ConfigError("zermelo instances are solved by zermelo_solve, not sampled for datasets");
  }
  DistributionSpec d;
  d.base = envs::make_instance(env);
  d.label = label;
  d.more_variables = more_variables;
  const int n_goal = static_cast<int>(d.base.cost.x_goal.size());
  const int n_const = static_cast<int>(d.base.env.constants.size());
  const int n_init = static_cast<int>(d.base.x_init.size());
  if (env == envs::EnvId::Brachistochrone) {
    if (label == DistLabel::ID) {
      d.goal = Box::uniform(1, -0.5, 0.5);
      d.x_init = Box::uniform(1, -0.5, 0.5);
    } else if (label == DistLabel::OOD) {
      d.goal = Box::uniform(1, 0.4, 1.3);
      d.x_init = Box::uniform(1, 0.4, 1.3);
    } else {
      throw ConfigError("brachistochrone has only id and ood distributions");
    }
    d.tf_lo = d.tf_hi = d.base.tf;
    d.constants = Box::uniform(n_const, 0.0, 0.0);
    if (more_variables) {
      throw ConfigError("brachistochrone has no more-variables mode (constants fix the geometry)");
    }
    return d;
  }
  const auto [lo, hi] = shift_range(label);
  d.goal = Box::uniform(n_goal, lo, hi);
  d.x_init = Box::uniform(n_init, lo, hi);
  d.constants = label == DistLabel::ID ? Box::uniform(n_const, -0.2, 0.2)
                                       : Box::uniform(n_const, -0.3, -0.2);
  return d;
}

envs::OcpInstance sample_instance(const DistributionSpec& dist, std::mt19937_64& rng) {
  envs::OcpInstance inst = dist.base;
  inst.cost.x_goal += draw(dist.goal, rng);
  if (dist.more_variables) {
    const Eigen::VectorXd eps = draw(dist.constants, rng);
    inst.env.constants = inst.env.constants.cwiseProduct((1.0 + eps.array()).matrix());
  }
  if (dist.varies_x_init()) inst.x_init += draw(dist.x_init, rng);
  inst.tf = dist.tf_lo == dist.tf_hi
                ? dist.tf_lo
                : std::uniform_real_distribution<double>(dist.tf_lo, dist.tf_hi)(rng);
  return inst;
}

nlohmann::json distribution_to_json(const DistributionSpec& d) {
  return {{"base", envs::instance_to_json(d.base)},
          {"label", to_string(d.label)},
          {"goal", box_json(d.goal)},
          {"more_variables", d.more_variables},
          {"constants", box_json(d.constants)},
          {"x_init", box_json(d.x_init)},
          {"tf", {d.tf_lo, d.tf_hi}}};
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
  DistributionSpec d;
  try {
    d.base = envs::instance_from_json(j.at("base"));
    d.label = dist_label_from_string(j.at("label").get<std::string>());
    d.goal = box_from(j.at("goal"));
    d.more_variables = j.at("more_variables").get<bool>();
    d.constants = box_from(j.at("constants"));
    d.x_init = box_from(j.at("x_init"));
    const auto tf = j.at("tf").get<std::vector<double>>();
    if (tf.size() != 2) throw SchemaError("distribution tf range needs two values");
    d.tf_lo = tf[0];
    d.tf_hi = tf[1];
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("distribution: ") + e.what());
  }
  d.validate();
  return d;
}

}  // namespace ncolab::datagen
