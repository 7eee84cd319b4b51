#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ncolab::op {

enum class BasisKind { Fourier, Chebyshev };

std::string to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);

/// Basis family on normalized time t in [0, 1].
///
/// Term 0 is the constant 1. Every other term j owns the adaptive pair
/// (theta[2(j-1)], theta[2(j-1)+1]) = (a, s):
///   fourier    term j: sin (j odd) or cos (j even) of k pi ((1 + a) t + s), k = (j + 1) / 2
///   chebyshev  term j: T_j(clamp((2t - 1)(1 + a) + s, -1, 1))
struct BasisSpec {
  BasisKind kind = BasisKind::Fourier;
  int p = 11;
  bool adaptive = true;
  double theta_bound = 0.5;

  /// Number of adaptive parameters (0 when not adaptive).
  int n_theta() const { return adaptive ? 2 * (p - 1) : 0; }
  void validate() const;
};

nlohmann::json basis_to_json(const BasisSpec& s);
BasisSpec basis_from_json(const nlohmann::json& j);

/// Basis values and their derivatives with respect to each term's (a, s).
struct BasisEval {
  Eigen::VectorXd b;
  Eigen::VectorXd db_da;
  Eigen::VectorXd db_ds;
};

/// theta must have length spec.n_theta(); an empty span means theta = 0.
void eval_basis(const BasisSpec& spec, double t, std::span<const double> theta, BasisEval& out);
Eigen::VectorXd eval_basis(const BasisSpec& spec, double t, std::span<const double> theta = {});

/// sum_j c_j b_j(t; 0) at every grid time.
Eigen::VectorXd interpolate_band_limited(const BasisSpec& spec, const Eigen::VectorXd& coeffs,
                                         const Eigen::VectorXd& t_grid);

/// Least-squares coefficients of the fixed basis for samples (t_grid, values).
Eigen::VectorXd fit_band_limited(const BasisSpec& spec, const Eigen::VectorXd& t_grid,
                                 const Eigen::VectorXd& values);

}  // namespace ncolab::op
