#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace bimanip {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Rigid transform (rotation + translation). Composition order matches
// homogeneous matrices: (a * b).apply(x) == a.apply(b.apply(x)).
struct Pose {
  Quat q = Quat::Identity();
  Vec3 p = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 apply(const Vec3& x) const { return q * x + p; }

  Pose operator*(const Pose& o) const { return {q * o.q, q * o.p + p}; }

  Pose inverse() const {
    const Quat qi = q.conjugate();
    return {qi, qi * (-p)};
  }
};

inline Quat quat_from_axis_angle(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis));
}

// Relative rotation angle of `a` w.r.t. `b` via the quaternion vector part,
// 2*asin(||vec||) clamped into arcsin's domain.
inline double quat_angle_from_vector_part(const Quat& a, const Quat& b) {
  const Quat d = a * b.conjugate();
  const double n = Vec3(d.x(), d.y(), d.z()).norm();
  return 2.0 * std::asin(std::min(n, 1.0));
}

}  // namespace bimanip
