#include "ncolab/envs/dynamics.hpp"

#include <cmath>

namespace ncolab::envs {

std::pair<Eigen::Matrix4d, Eigen::Matrix3d> quaternion_matrices(const Eigen::Vector4d& q,
                                                                 const Eigen::Vector3d& w) {
  if (std::abs(q.norm() - 1.0) > 1e-9) {
    throw DomainError("quaternion must be normalized (norm " + std::to_string(q.norm()) + ")");
  }
  Eigen::Matrix4d omega;
  omega << 0.0, -w[0], -w[1], -w[2],
           w[0], 0.0, w[2], -w[1],
           w[1], -w[2], 0.0, w[0],
           w[2], w[1], -w[0], 0.0;
  const double q1 = q[0], q2 = q[1], q3 = q[2], q4 = q[3];
  Eigen::Matrix3d r;
  r << 1.0 - 2.0 * (q3 * q3 + q4 * q4), 2.0 * (q2 * q3 - q4 * q1), 2.0 * (q2 * q4 + q3 * q1),
       2.0 * (q2 * q3 + q4 * q1), 1.0 - 2.0 * (q2 * q2 + q4 * q4), 2.0 * (q3 * q4 - q2 * q1),
       2.0 * (q2 * q4 - q3 * q1), 2.0 * (q3 * q4 + q2 * q1), 1.0 - 2.0 * (q2 * q2 + q3 * q3);
  return {omega, r};
}

Derivative eval_dynamics(const EnvSpec& env, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                         const std::optional<Eigen::Vector4d>& q) {
  if (x.size() != env.d_x || u.size() != env.d_u) {
    throw DimensionError(to_string(env.id) + " expects state " + std::to_string(env.d_x) +
                         " and control " + std::to_string(env.d_u) + ", got " +
                         std::to_string(x.size()) + " and " + std::to_string(u.size()));
  }
  if (q.has_value() != env.quaternion) {
    throw SchemaError(env.quaternion ? to_string(env.id) + " requires a quaternion"
                                     : to_string(env.id) + " takes no quaternion");
  }
  std::vector<double> z(x.data(), x.data() + x.size());
  if (q) z.insert(z.end(), q->data(), q->data() + 4);
  std::vector<double> dz(z.size());
  dynamics<double>(env, z, std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                   dz);
  Derivative out;
  out.dx = Eigen::Map<const Eigen::VectorXd>(dz.data(), env.d_x);
  if (q) out.dq = Eigen::Vector4d(dz[static_cast<std::size_t>(env.d_x)], dz[env.d_x + 1u],
                                  dz[env.d_x + 2u], dz[env.d_x + 3u]);
  return out;
}

Eigen::Matrix2d robotarm_mass_matrix(const EnvSpec& env, double x2) {
  const auto& k = env.constants;
  const double m1 = k[0], m2 = k[1], l1 = k[2], r1 = k[4], r2 = k[5], i1 = k[6], i2 = k[7];
  const double c2 = std::cos(x2);
  Eigen::Matrix2d m;
  m(0, 0) = m1 * r1 * r1 + i1 + m2 * (l1 * l1 + r2 * r2 + 2.0 * l1 * r2 * c2);
  m(0, 1) = m2 * (r2 * r2 + l1 * r2 * c2) + i2;
  m(1, 0) = m(0, 1);
  m(1, 1) = m2 * r2 * r2 + i2;
  return m;
}

}  // namespace ncolab::envs
