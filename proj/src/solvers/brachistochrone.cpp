#include "ncolab/solvers/brachistochrone.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "ncolab/core/error.hpp"

namespace ncolab::solvers {

namespace {

/// Sign change of f on [lo, hi] (f < 0 left of the root, f >= 0 right of it) on [lo, hi] by bisection to full precision.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CycloidSolution brachistochrone_analytic(double y1, double x1, double x2, double y2, double g,
                                         int n_points) {
  if (!(y1 > y2)) throw DomainError("brachistochrone endpoints must descend (y1 > y2)");
  if (!(x2 > x1)) throw DomainError("brachistochrone needs x2 > x1");
  if (!(g > 0.0)) throw DomainError("brachistochrone needs g > 0");
  if (n_points < 2) throw DomainError("cycloid sampling needs at least two points");
  const double span = x2 - x1;
  const double drop = y1 - y2;
  const double ratio = span / drop;
  if (!std::isfinite(ratio)) throw NumericalError("endpoint ratio is not finite");

  // (1 - cos th) > 0 on (0, 2 pi), so the sign of `shape` is the sign of
  // (th - sin th) / (1 - cos th) - ratio, which is increasing in th.
  auto one_minus_cos = [](double th) { return 2.0 * std::sin(0.5 * th) * std::sin(0.5 * th); };
  auto shape = [&](double th) { return (th - std::sin(th)) - ratio * one_minus_cos(th); };
  const double hi = 2.0 * std::numbers::pi;
  if (!(shape(hi) > 0.0)) throw NumericalError("cycloid root not bracketed");
  CycloidSolution sol;
  sol.Theta = bisect_increasing(shape, 0.0, hi);
  sol.k = drop / one_minus_cos(sol.Theta);
  sol.T = sol.Theta * std::sqrt(sol.k / g);

  sol.x = Eigen::VectorXd::LinSpaced(n_points, x1, x2);
  sol.y.resize(n_points);
  sol.y[0] = y1;
  sol.y[n_points - 1] = y2;
  for (int i = 1; i < n_points - 1; ++i) {
    const double target = (sol.x[i] - x1) / sol.k;
    const double th = bisect_increasing([target](double t) { return t - std::sin(t) - target; },
                                        0.0, sol.Theta);
    sol.y[i] = y1 - sol.k * one_minus_cos(th);
  }
  return sol;
}

}  // namespace ncolab::solvers
