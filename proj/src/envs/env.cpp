#include "ncolab/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncolab/core/error.hpp"

namespace ncolab::envs {

namespace {

struct EnvInfo {
  EnvId id;
  const char* name;
  int d_x;
  int d_u;
  bool quaternion;
};

constexpr EnvInfo kInfo[] = {
    {EnvId::Pendulum, "pendulum", 2, 1, false},
    {EnvId::RobotArm, "robotarm", 4, 1, false},
    {EnvId::CartPole, "cartpole", 4, 1, false},
    {EnvId::Quadrotor, "quadrotor", 9, 4, true},
    {EnvId::Rocket, "rocket", 9, 3, true},
    {EnvId::Brachistochrone, "brachistochrone", 1, 1, false},
    {EnvId::Zermelo, "zermelo", 2, 1, false},
    {EnvId::Linear, "linear", 1, 1, false},
};

const EnvInfo& info(EnvId id) {
  for (const auto& i : kInfo) {
    if (i.id == id) return i;
  }
  throw ConfigError("unknown environment id");
}

bool must_be_positive(std::string_view name) {
  static const std::vector<std::string> positive = {"m",  "m1", "m2", "mc", "mp", "l",
                                                    "l1", "l2", "I",  "I1", "I2", "Jx",
                                                    "Jy", "Jz", "V"};
  return std::find(positive.begin(), positive.end(), name) != positive.end();
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Eigen::VectorXd json_vec(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw SchemaError(std::string("instance field '") + key + "' missing or not an array");
  }
  const auto& a = j.at(key);
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) {
      throw SchemaError(std::string("instance field '") + key + "' has a non-numeric entry");
    }
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string to_string(EnvId id) { return info(id).name; }

EnvId env_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& i : kInfo) {
    if (lower == i.name) return i.id;
  }
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

const std::vector<EnvId>& synthetic_envs() {
  static const std::vector<EnvId> envs = {EnvId::Pendulum, EnvId::RobotArm, EnvId::CartPole,
                                          EnvId::Quadrotor, EnvId::Rocket};
  return envs;
}

const std::vector<std::string>& constant_names(EnvId id) {
  static const std::vector<std::string> pendulum = {"m", "g", "l", "I", "b"};
  static const std::vector<std::string> robotarm = {"m1", "m2", "l1", "l2", "r1",
                                                    "r2", "I1", "I2", "g"};
  static const std::vector<std::string> cartpole = {"mc", "mp", "l", "g"};
  static const std::vector<std::string> quadrotor = {"m", "g", "l", "c", "Jx", "Jy", "Jz"};
  static const std::vector<std::string> rocket = {"m", "g", "l", "Jx", "Jy", "Jz"};
  static const std::vector<std::string> brachistochrone = {"g", "x1", "x2"};
  static const std::vector<std::string> zermelo = {"V", "A", "B", "C", "D"};
  static const std::vector<std::string> linear = {"a", "b"};
  switch (id) {
    case EnvId::Pendulum: return pendulum;
    case EnvId::RobotArm: return robotarm;
    case EnvId::CartPole: return cartpole;
    case EnvId::Quadrotor: return quadrotor;
    case EnvId::Rocket: return rocket;
    case EnvId::Brachistochrone: return brachistochrone;
    case EnvId::Zermelo: return zermelo;
    case EnvId::Linear: return linear;
  }
  throw ConfigError("unknown environment id");
}

double EnvSpec::constant(std::string_view name) const {
  const auto& names = constant_names(id);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return constants[static_cast<Eigen::Index>(i)];
  }
  throw SchemaError(to_string(id) + " has no constant '" + std::string(name) + "'");
}

void EnvSpec::set_constant(std::string_view name, double value) {
  const auto& names = constant_names(id);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      constants[static_cast<Eigen::Index>(i)] = value;
      return;
    }
  }
  throw SchemaError(to_string(id) + " has no constant '" + std::string(name) + "'");
}

void EnvSpec::validate() const {
  const auto& names = constant_names(id);
  if (constants.size() != static_cast<Eigen::Index>(names.size())) {
    throw DimensionError(to_string(id) + " expects " + std::to_string(names.size()) +
                         " constants, got " + std::to_string(constants.size()));
  }
  const auto& i = info(id);
  if (d_x != i.d_x || d_u != i.d_u || quaternion != i.quaternion) {
    throw DimensionError(to_string(id) + " dimensions do not match its definition");
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double c = constants[static_cast<Eigen::Index>(k)];
    if (!std::isfinite(c)) throw NumericalError("constant '" + names[k] + "' is not finite");
    if (must_be_positive(names[k]) && !(c > 0.0)) {
      throw DomainError("constant '" + names[k] + "' must be strictly positive");
    }
  }
  if (id == EnvId::Brachistochrone) {
    if (!(constant("g") > 0.0)) throw DomainError("brachistochrone needs g > 0");
    if (!(constant("x2") > constant("x1"))) throw DomainError("brachistochrone needs x2 > x1");
  }
}

EnvSpec make_env(EnvId id) {
  const auto& i = info(id);
  EnvSpec env;
  env.id = id;
  env.d_x = i.d_x;
  env.d_u = i.d_u;
  env.quaternion = i.quaternion;
  switch (id) {
    case EnvId::Pendulum: env.constants = vec({1.0, 10.0, 1.0, 1.0 / 3.0, 0.0}); break;
    case EnvId::RobotArm:
      env.constants = vec({1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0, 0.0});
      break;
    case EnvId::CartPole: env.constants = vec({0.1, 0.1, 1.0, 10.0}); break;
    case EnvId::Quadrotor: env.constants = vec({1.0, 10.0, 0.4, 0.01, 1.0, 1.0, 1.0}); break;
    case EnvId::Rocket: env.constants = vec({1.0, 10.0, 1.0, 0.5, 1.0, 1.0}); break;
    case EnvId::Brachistochrone: env.constants = vec({10.0, 0.0, 2.0}); break;
    case EnvId::Zermelo: env.constants = vec({2.0, 0.0, 0.0, 0.0, 0.0}); break;
    case EnvId::Linear: env.constants = vec({0.0, 1.0}); break;
  }
  return env;
}

void CostSpec::validate(int d_x) const {
  if (x_goal.size() != d_x || c_x.size() != d_x) {
    throw DimensionError("cost vectors must have length " + std::to_string(d_x));
  }
  if (!x_goal.allFinite() || !c_x.allFinite() || !std::isfinite(c_u)) {
    throw NumericalError("cost parameters must be finite");
  }
  if ((c_x.array() < 0.0).any() || c_u < 0.0) {
    throw DomainError("cost weights must be non-negative");
  }
}

CostSpec make_cost(EnvId id) {
  const double pi = std::numbers::pi;
  CostSpec c;
  switch (id) {
    case EnvId::Pendulum:
      c.x_goal = vec({pi, 0.0});
      c.c_x = vec({10.0, 1.0});
      c.c_u = 0.1;
      break;
    case EnvId::RobotArm:
      c.x_goal = vec({pi / 2.0, 0.0, 0.0, 0.0});
      c.c_x = Eigen::VectorXd::Constant(4, 0.1);
      c.c_u = 0.1;
      break;
    case EnvId::CartPole:
      c.x_goal = vec({0.0, pi, 0.0, 0.0});
      c.c_x = vec({0.1, 0.6, 0.1, 0.1});
      c.c_u = 0.3;
      break;
    case EnvId::Quadrotor:
      c.x_goal = Eigen::VectorXd::Constant(9, 0.6);
      c.c_x = Eigen::VectorXd::Ones(9);
      c.c_u = 0.1;
      break;
    case EnvId::Rocket:
      c.x_goal = Eigen::VectorXd::Zero(9);
      c.c_x = Eigen::VectorXd::Ones(9);
      c.c_u = 0.4;
      break;
    case EnvId::Brachistochrone:
      // x_goal holds the end height y2; the travel time is the cost.
      c.x_goal = vec({1.5});
      c.c_x = Eigen::VectorXd::Zero(1);
      c.c_u = 0.0;
      break;
    case EnvId::Zermelo:
      c.x_goal = vec({1.0, 1.0});
      c.c_x = Eigen::VectorXd::Zero(2);
      c.c_u = 0.0;
      break;
    case EnvId::Linear:
      c.x_goal = vec({0.0});
      c.c_x = vec({1.0});
      c.c_u = 0.1;
      break;
  }
  return c;
}

void OcpInstance::validate() const {
  env.validate();
  cost.validate(env.d_x);
  if (x_init.size() != env.d_x) {
    throw DimensionError("x_init has length " + std::to_string(x_init.size()) + ", " +
                         to_string(env.id) + " state has " + std::to_string(env.d_x));
  }
  if (!x_init.allFinite()) throw NumericalError("x_init must be finite");
  if (!(tf > 0.0) || !std::isfinite(tf)) throw DomainError("tf must be positive");
  if (n_grid < 2) throw DomainError("n_grid must be at least 2");
  if (q_init.has_value() != env.quaternion) {
    throw SchemaError(env.quaternion ? to_string(env.id) + " requires an initial quaternion"
                                     : to_string(env.id) + " takes no quaternion");
  }
  if (q_init && std::abs(q_init->norm() - 1.0) > 1e-9) {
    throw DomainError("initial quaternion must have unit norm");
  }
  if (env.id == EnvId::Brachistochrone) {
    if (std::abs(tf - (env.constant("x2") - env.constant("x1"))) > 1e-12) {
      throw DomainError("brachistochrone horizon must equal x2 - x1");
    }
    if (!(x_init[0] > cost.x_goal[0])) {
      throw DomainError("brachistochrone needs a descending curve (y1 > y2)");
    }
  }
}

OcpInstance make_instance(EnvId id) {
  OcpInstance inst;
  inst.env = make_env(id);
  inst.cost = make_cost(id);
  switch (id) {
    case EnvId::Pendulum: inst.x_init = Eigen::VectorXd::Zero(2); break;
    case EnvId::RobotArm:
      inst.x_init = vec({std::numbers::pi / 4.0, std::numbers::pi / 2.0, 0.0, 0.0});
      break;
    case EnvId::CartPole: inst.x_init = Eigen::VectorXd::Zero(4); break;
    case EnvId::Quadrotor:
      inst.x_init = vec({-8.0, -6.0, 9.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
      inst.q_init = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
      break;
    case EnvId::Rocket:
      inst.x_init = vec({10.0, -8.0, 5.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
      inst.q_init = Eigen::Vector4d(std::cos(0.75), 0.0, 0.0, std::sin(0.75));
      break;
    case EnvId::Brachistochrone:
      inst.x_init = vec({2.5});
      inst.tf = 2.0;
      inst.n_grid = 101;
      break;
    case EnvId::Zermelo: inst.x_init = Eigen::VectorXd::Zero(2); break;
    case EnvId::Linear: inst.x_init = vec({1.0}); break;
  }
  return inst;
}

void ControlGrid::validate() const {
  if (values.rows() < 1) throw DimensionError("control grid needs at least one knot");
  if (!values.allFinite()) throw NumericalError("control grid has non-finite values");
}

void check_knots(int n_knots, int n_grid) {
  const int intervals = n_grid - 1;
  if (n_knots == n_grid) return;
  if (n_knots >= 1 && intervals % n_knots == 0) return;
  throw DimensionError("control grid with " + std::to_string(n_knots) +
                       " knots does not fit a time grid of " + std::to_string(n_grid) +
                       " points");
}

int knot_for_interval(int n_knots, int n_grid, int k) {
  if (n_knots == n_grid) return k;
  return k / ((n_grid - 1) / n_knots);
}

nlohmann::json instance_to_json(const OcpInstance& inst) {
  nlohmann::json j;
  j["env"] = to_string(inst.env.id);
  j["constants"] = to_std(inst.env.constants);
  j["x_goal"] = to_std(inst.cost.x_goal);
  j["c_x"] = to_std(inst.cost.c_x);
  j["c_u"] = inst.cost.c_u;
  j["x_init"] = to_std(inst.x_init);
  if (inst.q_init) {
    j["q_init"] = std::vector<double>(inst.q_init->data(), inst.q_init->data() + 4);
  }
  j["tf"] = inst.tf;
  j["n_grid"] = inst.n_grid;
  return j;
}

OcpInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("env") || !j.at("env").is_string()) {
    throw SchemaError("instance record lacks an 'env' string");
  }
  OcpInstance inst;
  inst.env = make_env(env_from_string(j.at("env").get<std::string>()));
  inst.env.constants = json_vec(j, "constants");
  inst.cost.x_goal = json_vec(j, "x_goal");
  inst.cost.c_x = json_vec(j, "c_x");
  if (!j.contains("c_u") || !j.at("c_u").is_number()) throw SchemaError("instance lacks 'c_u'");
  inst.cost.c_u = j.at("c_u").get<double>();
  inst.x_init = json_vec(j, "x_init");
  if (j.contains("q_init")) {
    const Eigen::VectorXd q = json_vec(j, "q_init");
    if (q.size() != 4) throw SchemaError("q_init must have 4 entries");
    inst.q_init = Eigen::Vector4d(q);
  }
  if (!j.contains("tf") || !j.at("tf").is_number()) throw SchemaError("instance lacks 'tf'");
  if (!j.contains("n_grid") || !j.at("n_grid").is_number_integer()) {
    throw SchemaError("instance lacks integer 'n_grid'");
  }
  inst.tf = j.at("tf").get<double>();
  inst.n_grid = j.at("n_grid").get<int>();
  inst.validate();
  return inst;
}

}  // namespace ncolab::envs
