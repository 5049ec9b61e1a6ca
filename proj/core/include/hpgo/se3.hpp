#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <utility>

#include "hpgo/errors.hpp"

namespace hpgo {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  // clang-format off
  m <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return m;
}

// Minimal coordinates of a rigid-body displacement: translation part rho,
// rotation part theta (axis-angle, angle = |theta|). Stacked as [rho; theta]
// when a 6-vector is needed.
struct Twist {
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();

  Twist() = default;
  Twist(const Eigen::Vector3d& rho_in, const Eigen::Vector3d& theta_in)
      : rho(rho_in), theta(theta_in) {}
  explicit Twist(const Vector6d& v) : rho(v.head<3>()), theta(v.tail<3>()) {}

  Vector6d vector() const {
    Vector6d v;
    v << rho, theta;
    return v;
  }
};

// Rigid-body transform stored as a unit quaternion plus a translation.
// The quaternion is renormalized on construction and kept in the w >= 0
// hemisphere so that equal rotations compare equal component-wise.
class Pose {
 public:
  Pose() : q_(Eigen::Quaterniond::Identity()), t_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

  static Pose identity() { return Pose(); }

  // Exponential map. Rodrigues for the rotation; the translation is coupled
  // through the left Jacobian of SO(3). Small angles take a Taylor branch.
  static Pose exp(const Twist& xi);

  // Logarithm map, principal branch. Throws AngleAtPiError when the rotation
  // angle is within 1e-6 of pi, where the branch is not stable.
  Twist log() const;

  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

  const Eigen::Quaterniond& rotation() const { return q_; }
  const Eigen::Vector3d& translation() const { return t_; }
  Eigen::Matrix3d rotation_matrix() const { return q_.toRotationMatrix(); }

  // Rotation angle in [0, pi].
  double rotation_angle() const;

  // Adjoint acting on [rho; theta] twist vectors.
  Matrix6d adjoint() const;

  // Largest absolute difference over the seven stored components
  // (quaternion hemisphere-aligned first).
  static double component_distance(const Pose& a, const Pose& b);

 private:
  Eigen::Quaterniond q_;
  Eigen::Vector3d t_;
};

// Logarithm that never throws: at angle pi the axis is picked from the
// dominant quaternion component. Only meant for weighting heuristics where
// any consistent branch will do.
Twist log_unchecked(const Pose& p);

// Jacobians of the constraint error
//   e(xi, xj) = log(zij^-1 * (xi^-1 * xj))
// with respect to right-multiplicative perturbations xi <- xi * exp(d_i),
// xj <- xj * exp(d_j), evaluated at d = 0. Returns (J_i, J_j), each 6x6 with
// rows ordered like the error twist [rho; theta]. Throws AngleAtPiError when
// the error rotation is near pi.
std::pair<Matrix6d, Matrix6d> error_jacobians(const Pose& xi, const Pose& xj,
                                              const Pose& zij);

}  // namespace hpgo
