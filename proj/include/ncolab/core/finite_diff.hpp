#pragma once

#include <functional>
#include <span>

#include <Eigen/Dense>

namespace ncolab::core {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h for every coordinate.
/// Test oracle for the reverse-mode paths; never used by the library itself.
Eigen::VectorXd finite_diff_grad(const ScalarFn& f, std::span<const double> params,
                                 double h = 1e-5);

/// max_i |a_i - b_i| / max(|b|_inf, floor). A single scale for the whole vector
/// avoids blowing up on entries that are zero up to rounding.
double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                      double floor = 1e-12);

}  // namespace ncolab::core
