#include "hpgo/se3.hpp"

#include <cmath>

namespace hpgo {
namespace {

// Angle below which the coefficient series replace the closed forms. The
// closed forms cancel catastrophically well before doubles run out, so the
// switch sits far above the representable limit.
constexpr double kTaylorAngle = 1e-4;

// Gate around pi for the principal logarithm.
constexpr double kPiMargin = 1e-6;

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& theta) {
  const double t = theta.norm();
  const Eigen::Matrix3d w = skew(theta);
  double c1, c2;  // (1 - cos t)/t^2, (t - sin t)/t^3
  if (t < kTaylorAngle) {
    const double t2 = t * t;
    c1 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    c2 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  } else {
    c1 = (1.0 - std::cos(t)) / (t * t);
    c2 = (t - std::sin(t)) / (t * t * t);
  }
  return Eigen::Matrix3d::Identity() + c1 * w + c2 * w * w;
}

Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& theta) {
  const double t = theta.norm();
  const Eigen::Matrix3d w = skew(theta);
  double c;  // (1 - (t/2) cot(t/2)) / t^2
  if (t < kTaylorAngle) {
    const double t2 = t * t;
    c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double half = 0.5 * t;
    c = (1.0 - half * std::cos(half) / std::sin(half)) / (t * t);
  }
  return Eigen::Matrix3d::Identity() - 0.5 * w + c * w * w;
}

// Coupling block of the SE(3) left Jacobian for the twist [rho; theta].
Eigen::Matrix3d se3_jacobian_q(const Eigen::Vector3d& rho,
                               const Eigen::Vector3d& theta) {
  const double t = theta.norm();
  const Eigen::Matrix3d p = skew(rho);
  const Eigen::Matrix3d w = skew(theta);
  double a1, a2, a3;
  if (t < kTaylorAngle) {
    const double t2 = t * t;
    a1 = 1.0 / 6.0 - t2 / 120.0;
    a2 = 1.0 / 24.0 - t2 / 720.0;
    a3 = 1.0 / 120.0 - t2 / 2520.0;
  } else {
    const double t2 = t * t;
    const double t4 = t2 * t2;
    const double st = std::sin(t);
    const double ct = std::cos(t);
    a1 = (t - st) / (t2 * t);
    a2 = (t2 + 2.0 * ct - 2.0) / (2.0 * t4);
    a3 = (2.0 * t - 3.0 * st + t * ct) / (2.0 * t4 * t);
  }
  const Eigen::Matrix3d wp = w * p;
  const Eigen::Matrix3d pw = p * w;
  const Eigen::Matrix3d wpw = wp * w;
  return 0.5 * p + a1 * (wp + pw + wpw) +
         a2 * (w * wp + pw * w - 3.0 * wpw) + a3 * (wpw * w + w * wpw);
}

Matrix6d se3_left_jacobian_inv(const Vector6d& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d theta = xi.tail<3>();
  const Eigen::Matrix3d jinv = so3_left_jacobian_inv(theta);
  const Eigen::Matrix3d q = se3_jacobian_q(rho, theta);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = jinv;
  out.bottomRightCorner<3, 3>() = jinv;
  out.topRightCorner<3, 3>() = -jinv * q * jinv;
  return out;
}

Matrix6d se3_right_jacobian_inv(const Vector6d& xi) {
  return se3_left_jacobian_inv(-xi);
}

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  q.normalize();
  if (q.w() < 0.0 ||
      (q.w() == 0.0 &&
       (q.x() < 0.0 || (q.x() == 0.0 && (q.y() < 0.0 || (q.y() == 0.0 && q.z() < 0.0)))))) {
    q.coeffs() = -q.coeffs();
  }
  return q;
}

Twist log_impl(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
               bool checked) {
  const Eigen::Vector3d v(q.x(), q.y(), q.z());
  const double vn = v.norm();
  const double angle = 2.0 * std::atan2(vn, q.w());
  if (checked && angle >= M_PI - kPiMargin) {
    throw AngleAtPiError("rotation angle " + std::to_string(angle) +
                         " too close to pi for a stable logarithm");
  }
  Eigen::Vector3d theta;
  if (vn < 1e-12) {
    theta = (2.0 / q.w()) * v;
  } else {
    theta = (angle / vn) * v;
  }
  Twist xi;
  xi.theta = theta;
  xi.rho = so3_left_jacobian_inv(theta) * t;
  return xi;
}

}  // namespace

Pose::Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
    : q_(canonical(q)), t_(t) {}

Pose Pose::exp(const Twist& xi) {
  const double t = xi.theta.norm();
  Eigen::Quaterniond q;
  if (t < kTaylorAngle) {
    const double t2 = t * t;
    const double w = 1.0 - t2 / 8.0 + t2 * t2 / 384.0;
    const double k = 0.5 - t2 / 48.0 + t2 * t2 / 3840.0;
    q = Eigen::Quaterniond(w, k * xi.theta.x(), k * xi.theta.y(),
                           k * xi.theta.z());
  } else {
    q = Eigen::Quaterniond(Eigen::AngleAxisd(t, xi.theta / t));
  }
  return Pose(q, so3_left_jacobian(xi.theta) * xi.rho);
}

Twist Pose::log() const { return log_impl(q_, t_, true); }

Twist log_unchecked(const Pose& p) {
  return log_impl(p.rotation(), p.translation(), false);
}

Pose Pose::inverse() const {
  const Eigen::Quaterniond qi = q_.conjugate();
  return Pose(qi, -(qi * t_));
}

Pose Pose::operator*(const Pose& rhs) const {
  return Pose(q_ * rhs.q_, t_ + q_ * rhs.t_);
}

double Pose::rotation_angle() const {
  const Eigen::Vector3d v(q_.x(), q_.y(), q_.z());
  return 2.0 * std::atan2(v.norm(), q_.w());
}

Matrix6d Pose::adjoint() const {
  const Eigen::Matrix3d r = rotation_matrix();
  Matrix6d ad = Matrix6d::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.bottomRightCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = skew(t_) * r;
  return ad;
}

double Pose::component_distance(const Pose& a, const Pose& b) {
  Eigen::Quaterniond qb = b.q_;
  if (a.q_.dot(qb) < 0.0) qb.coeffs() = -qb.coeffs();
  double d = (a.t_ - b.t_).cwiseAbs().maxCoeff();
  d = std::max(d, (a.q_.coeffs() - qb.coeffs()).cwiseAbs().maxCoeff());
  return d;
}

std::pair<Matrix6d, Matrix6d> error_jacobians(const Pose& xi, const Pose& xj,
                                              const Pose& zij) {
  const Pose rel = xi.inverse() * xj;
  const Pose err = zij.inverse() * rel;
  const Twist e = err.log();
  const Matrix6d jr_inv = se3_right_jacobian_inv(e.vector());
  const Matrix6d jj = jr_inv;
  const Matrix6d ji = -jr_inv * rel.inverse().adjoint();
  return {ji, jj};
}

}  // namespace hpgo
