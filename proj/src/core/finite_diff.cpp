#include "ncolab/core/finite_diff.hpp"

#include <algorithm>
#include <vector>

namespace ncolab::core {

Eigen::VectorXd finite_diff_grad(const ScalarFn& f, std::span<const double> params,
                                 double h) {
  std::vector<double> p(params.begin(), params.end());
  Eigen::VectorXd g(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double fp = f(p);
    p[i] = orig - h;
    const double fm = f(p);
    p[i] = orig;
    g[static_cast<Eigen::Index>(i)] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), floor);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace ncolab::core
