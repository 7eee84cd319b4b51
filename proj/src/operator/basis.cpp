#include "ncolab/operator/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncolab/core/error.hpp"

namespace ncolab::op {

std::string to_string(BasisKind k) { return k == BasisKind::Fourier ? "fourier" : "chebyshev"; }

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "fourier") return BasisKind::Fourier;
  if (s == "chebyshev") return BasisKind::Chebyshev;
  throw ConfigError("unknown basis kind '" + s + "'");
}

void BasisSpec::validate() const {
  if (p < 1) throw ConfigError("basis needs p >= 1, got " + std::to_string(p));
  if (kind == BasisKind::Fourier && p % 2 == 0) {
    throw ConfigError("fourier basis needs an odd p, got " + std::to_string(p));
  }
  if (!(theta_bound > 0.0) || !std::isfinite(theta_bound)) {
    throw ConfigError("theta_bound must be positive and finite");
  }
}

nlohmann::json basis_to_json(const BasisSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"p", s.p},
          {"adaptive", s.adaptive},
          {"theta_bound", s.theta_bound}};
}

BasisSpec basis_from_json(const nlohmann::json& j) {
  BasisSpec s;
  try {
    s.kind = basis_kind_from_string(j.at("kind").get<std::string>());
    s.p = j.at("p").get<int>();
    s.adaptive = j.at("adaptive").get<bool>();
    s.theta_bound = j.at("theta_bound").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("basis spec: ") + e.what());
  }
  s.validate();
  return s;
}

void eval_basis(const BasisSpec& spec, double t, std::span<const double> theta, BasisEval& out) {
  const int p = spec.p;
  if (!theta.empty() && static_cast<int>(theta.size()) != spec.n_theta()) {
    throw DimensionError("basis expects " + std::to_string(spec.n_theta()) +
                         " adaptive parameters, got " + std::to_string(theta.size()));
  }
  out.b.resize(p);
  out.db_da.setZero(p);
  out.db_ds.setZero(p);
  out.b[0] = 1.0;
  auto pair = [&](int j) {
    if (theta.empty()) return std::pair<double, double>{0.0, 0.0};
    const auto i = static_cast<std::size_t>(2 * (j - 1));
    return std::pair<double, double>{theta[i], theta[i + 1]};
  };
  if (spec.kind == BasisKind::Fourier) {
    for (int j = 1; j < p; ++j) {
      const auto [a, s] = pair(j);
      const double w = static_cast<double>((j + 1) / 2) * std::numbers::pi;
      const double arg = w * ((1.0 + a) * t + s);
      double val;
      double der;
      if (j % 2 == 1) {
        val = std::sin(arg);
        der = std::cos(arg);
      } else {
        val = std::cos(arg);
        der = -std::sin(arg);
      }
      out.b[j] = val;
      out.db_da[j] = der * w * t;
      out.db_ds[j] = der * w;
    }
    return;
  }
  for (int j = 1; j < p; ++j) {
    const auto [a, s] = pair(j);
    const double raw = (2.0 * t - 1.0) * (1.0 + a) + s;
    const bool clamped = raw < -1.0 || raw > 1.0;
    const double x = std::clamp(raw, -1.0, 1.0);
    // T_n and T_n' by the three-term recurrences.
    double t_prev = 1.0;
    double t_cur = x;
    double d_prev = 0.0;
    double d_cur = 1.0;
    for (int n = 1; n < j; ++n) {
      const double t_next = 2.0 * x * t_cur - t_prev;
      const double d_next = 2.0 * t_cur + 2.0 * x * d_cur - d_prev;
      t_prev = t_cur;
      t_cur = t_next;
      d_prev = d_cur;
      d_cur = d_next;
    }
    out.b[j] = t_cur;
    const double der = clamped ? 0.0 : d_cur;
    out.db_da[j] = der * (2.0 * t - 1.0);
    out.db_ds[j] = der;
  }
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, double t, std::span<const double> theta) {
  BasisEval e;
  eval_basis(spec, t, theta, e);
  return e.b;
}

namespace {

Eigen::MatrixXd design_matrix(const BasisSpec& spec, const Eigen::VectorXd& t_grid) {
  Eigen::MatrixXd a(t_grid.size(), spec.p);
  BasisEval e;
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    eval_basis(spec, t_grid[i], {}, e);
    a.row(i) = e.b.transpose();
  }
  return a;
}

}  // namespace

Eigen::VectorXd interpolate_band_limited(const BasisSpec& spec, const Eigen::VectorXd& coeffs,
                                         const Eigen::VectorXd& t_grid) {
  if (coeffs.size() != spec.p) {
    throw DimensionError("expected " + std::to_string(spec.p) + " coefficients, got " +
                         std::to_string(coeffs.size()));
  }
  return design_matrix(spec, t_grid) * coeffs;
}

Eigen::VectorXd fit_band_limited(const BasisSpec& spec, const Eigen::VectorXd& t_grid,
                                 const Eigen::VectorXd& values) {
  if (t_grid.size() != values.size()) throw DimensionError("grid and values differ in length");
  return design_matrix(spec, t_grid).colPivHouseholderQr().solve(values);
}

}  // namespace ncolab::op
