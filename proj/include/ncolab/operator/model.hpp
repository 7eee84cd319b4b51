#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ncolab/core/mlp.hpp"
#include "ncolab/envs/env.hpp"
#include "ncolab/operator/basis.hpp"
#include "ncolab/operator/encoder.hpp"

namespace ncolab::op {

enum class OperatorKind { NASM, SNO, DON, MLP };
enum class Aggregation { Sum, Neural };

std::string to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);
std::string to_string(Aggregation a);
Aggregation aggregation_from_string(const std::string& s);

/// Coefficient net maps [t; e] (or e alone when static) to d_u * p
/// coefficients (row d * p + j is c_{d,j}) followed by n_theta raw adaptive
/// parameters, bounded as theta = theta_bound * tanh(raw). One net is shared by
/// all control dimensions.
struct NasmConfig {
  BasisSpec basis;
  std::vector<int> coef_hidden{40, 40};
  bool non_static_coef = true;
  Aggregation aggregation = Aggregation::Sum;
  /// Hidden widths of the aggregation net R^p -> R applied to c_d (.) b.
  std::vector<int> agg_hidden{16};
};

/// u_d(t) = <branch(e)[d * latent : (d + 1) * latent], trunk(t)>.
struct DonConfig {
  std::vector<int> branch_hidden{32, 32};
  std::vector<int> trunk_hidden{32, 32};
  int latent = 20;
};

/// u = net([e; t]).
struct MlpConfig {
  std::vector<int> hidden{40, 40};
};

struct OperatorConfig {
  OperatorKind kind = OperatorKind::NASM;
  NasmConfig nasm;
  DonConfig don;
  MlpConfig mlp;
  core::Activation activation = core::Activation::Tanh;

  /// SNO requires a fixed basis, a static coefficient net and sum aggregation.
  void validate() const;
};

nlohmann::json config_to_json(const OperatorConfig& c);
OperatorConfig config_from_json(const nlohmann::json& j);

/// NASM settings with the SNO restrictions applied.
OperatorConfig make_sno_config(const NasmConfig& nasm);

/// Parameter budget per environment (Pendulum 3153, Quadrotor 13732, ...).
int param_target(envs::EnvId env);

/// Config of the given kind whose hidden widths (two equal hidden layers per
/// net) give the parameter count closest to param_target(env).
OperatorConfig default_config(OperatorKind kind, envs::EnvId env, int encoder_dim, int d_u);

/// Which parameters finetune leaves untouched. Default freezes the first
/// layer of the coefficient net and the rows producing theta (NASM, SNO), the
/// trunk (DON), or the first layer (MLP).
enum class FreezeSet { None, Default, All };

std::string to_string(FreezeSet f);
FreezeSet freeze_set_from_string(const std::string& s);

class OperatorModel {
 public:
  OperatorModel(OperatorConfig config, EncoderSpec encoder, int d_u, std::uint64_t seed);

  OperatorKind kind() const { return config_.kind; }
  const OperatorConfig& config() const { return config_; }
  const EncoderSpec& encoder() const { return encoder_; }
  int d_u() const { return d_u_; }

  const std::vector<std::string>& net_names() const { return names_; }
  const std::vector<core::MlpParams>& nets() const { return nets_; }
  std::vector<core::MlpParams>& nets() { return nets_; }
  core::MlpParams& net(const std::string& name);

  std::size_t num_params() const;
  /// All parameters, nets in net_names() order, each in append_flat order.
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& flat);
  std::vector<bool> frozen_mask(FreezeSet set) const;

  /// Batched forward: e is m x B (encoded inputs), t holds B normalized
  /// times t / tf. Returns d_u x B.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& e, const Eigen::VectorXd& t) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& e, double t) const;

  /// Bounded adaptive parameters (n_theta x B). Empty for a fixed basis.
  Eigen::MatrixXd theta(const Eigen::MatrixXd& e, const Eigen::VectorXd& t) const;

  /// Mean over the batch of |u_hat - target|^2, with its gradient with respect
  /// to params() when grad is non-null.
  double loss(const Eigen::MatrixXd& e, const Eigen::VectorXd& t, const Eigen::MatrixXd& target,
              Eigen::VectorXd* grad) const;

  /// Predicted controls at every grid time of the instance (n_grid x d_u).
  envs::ControlGrid predict_grid(const envs::OcpInstance& inst) const;

  nlohmann::json descriptor() const;
  void save(const std::filesystem::path& stem) const;
  static OperatorModel load(const std::filesystem::path& stem);

 private:
  struct Cache;
  Eigen::MatrixXd run(const Eigen::MatrixXd& e, const Eigen::VectorXd& t, Cache* cache) const;
  void backward(const Cache& cache, const Eigen::MatrixXd& d_u_hat,
                std::vector<core::MlpParams>& grads) const;
  void check_inputs(const Eigen::MatrixXd& e, const Eigen::VectorXd& t) const;

  OperatorConfig config_;
  EncoderSpec encoder_;
  int d_u_;
  std::vector<std::string> names_;
  std::vector<core::MlpParams> nets_;
};

}  // namespace ncolab::op
