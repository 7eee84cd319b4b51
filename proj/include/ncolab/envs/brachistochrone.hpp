#pragma once

#include <cmath>
#include <span>
#include <string>

#include "ncolab/core/error.hpp"
#include "ncolab/core/tape.hpp"

namespace ncolab::envs {

/// Travel time of a bead sliding from rest along the polyline through
/// (x1 + i h, y[i]), i = 0..n-1. On each straight segment the acceleration
/// is constant, so the segment takes 2 L / (v_a + v_b) with
/// v = sqrt(2 g (y1 - y)). The start speed is exactly zero, so the
/// singularity of the integrand at x1 never has to be evaluated.
/// Throws DomainError when a point after the start is not below y1.
template <class T>
T brachistochrone_time_generic(std::span<const T> y, double y1, double h, double g) {
  using std::sqrt;
  if (y.size() < 2) throw DomainError("brachistochrone curve needs at least two points");
  if (!(g > 0.0) || !(h > 0.0)) throw DomainError("brachistochrone needs g > 0 and h > 0");
  T total = core::constant_like(y[0], 0.0);
  T v_prev = core::constant_like(y[0], 0.0);
  T y_prev = core::constant_like(y[0], y1);
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double drop = y1 - core::value_of(y[i]);
    if (!(drop > 0.0)) {
      throw DomainError("curve point " + std::to_string(i) + " is not below the start height");
    }
    const T v = sqrt(2.0 * g * (y1 - y[i]));
    const T dy = y[i] - y_prev;
    const T len = sqrt(h * h + dy * dy);
    total = total + 2.0 * len / (v_prev + v);
    v_prev = v;
    y_prev = y[i];
  }
  return total;
}

double brachistochrone_time(std::span<const double> y, double y1, double h, double g);

}  // namespace ncolab::envs
