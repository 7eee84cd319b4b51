#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ncolab/core/error.hpp"
#include "ncolab/core/tape.hpp"
#include "ncolab/envs/env.hpp"

namespace ncolab::envs {

/// Right-hand side of the state equation and, for quaternion environments,
/// of the attitude equation.
struct Derivative {
  Eigen::VectorXd dx;
  std::optional<Eigen::Vector4d> dq;
};

/// Omega(w) and R(q) of the rigid-body attitude equations, scalar-first q.
/// Throws DomainError unless |q| = 1 within 1e-9.
std::pair<Eigen::Matrix4d, Eigen::Matrix3d> quaternion_matrices(const Eigen::Vector4d& q,
                                                                 const Eigen::Vector3d& w);

Derivative eval_dynamics(const EnvSpec& env, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         const std::optional<Eigen::Vector4d>& q = std::nullopt);

/// RobotArm inertia matrix M(x) for the given constants.
Eigen::Matrix2d robotarm_mass_matrix(const EnvSpec& env, double x2);

namespace detail {

template <class T>
using Vec3 = std::array<T, 3>;

template <class T>
Vec3<T> rotate_transpose(std::span<const T> q, const Vec3<T>& f) {
  // R(q)^T f with R(q) written out entrywise.
  const T& q1 = q[0];
  const T& q2 = q[1];
  const T& q3 = q[2];
  const T& q4 = q[3];
  const T r11 = 1.0 - 2.0 * (q3 * q3 + q4 * q4);
  const T r12 = 2.0 * (q2 * q3 - q4 * q1);
  const T r13 = 2.0 * (q2 * q4 + q3 * q1);
  const T r21 = 2.0 * (q2 * q3 + q4 * q1);
  const T r22 = 1.0 - 2.0 * (q2 * q2 + q4 * q4);
  const T r23 = 2.0 * (q3 * q4 - q2 * q1);
  const T r31 = 2.0 * (q2 * q4 - q3 * q1);
  const T r32 = 2.0 * (q3 * q4 + q2 * q1);
  const T r33 = 1.0 - 2.0 * (q2 * q2 + q3 * q3);
  return {r11 * f[0] + r21 * f[1] + r31 * f[2], r12 * f[0] + r22 * f[1] + r32 * f[2],
          r13 * f[0] + r23 * f[1] + r33 * f[2]};
}

template <class T>
std::array<T, 4> quaternion_rate(std::span<const T> q, const T& w1, const T& w2, const T& w3) {
  return {0.5 * (-w1 * q[1] - w2 * q[2] - w3 * q[3]), 0.5 * (w1 * q[0] + w3 * q[2] - w2 * q[3]),
          0.5 * (w2 * q[0] - w3 * q[1] + w1 * q[3]), 0.5 * (w3 * q[0] + w2 * q[1] - w1 * q[2])};
}

/// Rigid body shared by Quadrotor and Rocket: z = [p, v, w, q], force f
/// and torque tau in the body frame, gravity along axis `g_axis`.
template <class T>
void rigid_body(std::span<const T> z, const Vec3<T>& f, const Vec3<T>& tau, double m, double g,
                int g_axis, double jx, double jy, double jz, std::span<T> dz) {
  const std::span<const T> q = z.subspan(9, 4);
  const Vec3<T> fw = rotate_transpose(q, f);
  for (int i = 0; i < 3; ++i) {
    dz[i] = z[3 + i];
    dz[3 + i] = fw[i] / m;
    if (i == g_axis) dz[3 + i] = dz[3 + i] + g;
  }
  const T& w1 = z[6];
  const T& w2 = z[7];
  const T& w3 = z[8];
  // w x (J w) for diagonal J.
  const T jw1 = jx * w1;
  const T jw2 = jy * w2;
  const T jw3 = jz * w3;
  dz[6] = (tau[0] - (w2 * jw3 - w3 * jw2)) / jx;
  dz[7] = (tau[1] - (w3 * jw1 - w1 * jw3)) / jy;
  dz[8] = (tau[2] - (w1 * jw2 - w2 * jw1)) / jz;
  const auto dq = quaternion_rate(q, w1, w2, w3);
  for (int i = 0; i < 4; ++i) dz[9 + i] = dq[i];
}

}  // namespace detail

/// dz = f(z, u) over the augmented state z (state followed by quaternion).
/// Works for double and tape Var.
template <class T>
void dynamics(const EnvSpec& env, std::span<const T> z, std::span<const T> u, std::span<T> dz) {
  using std::cos;
  using std::sin;
  const auto& k = env.constants;
  switch (env.id) {
    case EnvId::Pendulum: {
      const double m = k[0], g = k[1], l = k[2], inertia = k[3], b = k[4];
      dz[0] = z[1];
      dz[1] = (u[0] - m * g * l * sin(z[0]) - b * z[1]) / inertia;
      return;
    }
    case EnvId::RobotArm: {
      const double m1 = k[0], m2 = k[1], l1 = k[2], r1 = k[4], r2 = k[5];
      const double i1 = k[6], i2 = k[7], g = k[8];
      const T c2 = cos(z[1]);
      const T s2 = sin(z[1]);
      const T m11 = m1 * r1 * r1 + i1 + m2 * (l1 * l1 + r2 * r2 + 2.0 * l1 * r2 * c2);
      const T m12 = m2 * (r2 * r2 + l1 * r2 * c2) + i2;
      const double m22 = m2 * r2 * r2 + i2;
      const T h = m2 * l1 * r2 * s2;
      const T cq1 = -h * z[3] * z[2] - h * (z[2] + z[3]) * z[3];
      const T cq2 = h * z[2] * z[2];
      const T g1 = m1 * r1 * g * cos(z[0]) + m2 * g * (r2 * cos(z[0] + z[1]) + l1 * cos(z[0]));
      const T g2 = m2 * g * r2 * cos(z[0] + z[1]);
      const T rhs1 = -cq1 - g1;
      const T rhs2 = u[0] - cq2 - g2;
      const T det = m11 * m22 - m12 * m12;
      if (!(core::value_of(det) > 1e-12)) {
        throw NumericalError("robotarm: singular manipulator matrix (det " +
                             std::to_string(core::value_of(det)) + ")");
      }
      dz[0] = z[2];
      dz[1] = z[3];
      dz[2] = (m22 * rhs1 - m12 * rhs2) / det;
      dz[3] = (m11 * rhs2 - m12 * rhs1) / det;
      return;
    }
    case EnvId::CartPole: {
      const double mc = k[0], mp = k[1], l = k[2], g = k[3];
      const T s = sin(z[1]);
      const T c = cos(z[1]);
      const T den = mc + mp * s * s;
      dz[0] = z[2];
      dz[1] = z[3];
      dz[2] = (u[0] + mp * s * (l * z[3] * z[3] + g * c)) / den;
      dz[3] = (-u[0] * c - mp * l * z[3] * z[3] * c * s - (mc + mp) * g * s) / (l * den);
      return;
    }
    case EnvId::Quadrotor: {
      const double m = k[0], g = k[1], l = k[2], c = k[3];
      const detail::Vec3<T> f = {0.0 * u[0], 0.0 * u[0], u[0] + u[1] + u[2] + u[3]};
      const detail::Vec3<T> tau = {0.5 * l * (u[3] - u[1]), 0.5 * l * (u[2] - u[0]),
                                   c * (u[0] - u[1] + u[2] - u[3])};
      detail::rigid_body<T>(z, f, tau, m, g, 2, k[4], k[5], k[6], dz);
      return;
    }
    case EnvId::Rocket: {
      const double m = k[0], g = k[1], l = k[2];
      const detail::Vec3<T> f = {u[0], u[1], u[2]};
      const detail::Vec3<T> tau = {0.0 * u[0], 0.5 * l * u[2], -0.5 * l * u[1]};
      detail::rigid_body<T>(z, f, tau, m, g, 0, k[3], k[4], k[5], dz);
      return;
    }
    case EnvId::Zermelo: {
      const double v = k[0], a = k[1], b = k[2], c = k[3], d = k[4];
      dz[0] = v * cos(u[0]) + a * z[0] + b * z[1];
      dz[1] = v * sin(u[0]) + c * z[0] + d * z[1];
      return;
    }
    case EnvId::Linear: {
      dz[0] = k[0] * z[0] + k[1] * u[0];
      return;
    }
    case EnvId::Brachistochrone:
      throw ConfigError("brachistochrone has no state equation");
  }
}

/// One explicit Euler step in place; the quaternion block is re-normalized.
template <class T, class D>
void euler_step(const EnvSpec& env, std::vector<T>& z, std::span<const T> u, const D& dt,
                std::vector<T>& scratch) {
  scratch.resize(z.size());
  dynamics<T>(env, std::span<const T>(z), u, std::span<T>(scratch));
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = z[i] + dt * scratch[i];
  if (env.quaternion) {
    using std::sqrt;
    const std::size_t o = static_cast<std::size_t>(env.d_x);
    const T norm = sqrt(z[o] * z[o] + z[o + 1] * z[o + 1] + z[o + 2] * z[o + 2] + z[o + 3] * z[o + 3]);
    for (std::size_t i = 0; i < 4; ++i) z[o + i] = z[o + i] / norm;
  }
}

}  // namespace ncolab::envs
