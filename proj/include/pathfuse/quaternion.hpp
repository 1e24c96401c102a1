// Copyright 2026 The pathfuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace pathfuse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion, Hamilton convention, scalar first.  Orientations are
/// body-to-world rotations throughout the library.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_)
      : w(w_), x(x_), y(y_), z(z_) {}

  static Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quaternion conjugate() const { return {w, -x, -y, -z}; }

  /// Skips the division when the norm already is 1 within floating-point
  /// noise, so repeated renormalization of a unit quaternion is a no-op.
  Quaternion normalized() const {
    const double n2 = w * w + x * x + y * y + z * z;
    if (std::abs(n2 - 1.0) <= 8.0 * std::numeric_limits<double>::epsilon()) {
      return *this;
    }
    const double inv = 1.0 / std::sqrt(n2);
    return {w * inv, x * inv, y * inv, z * inv};
  }

  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }

  static Quaternion from_coeffs(const Eigen::Vector4d& c) {
    return {c(0), c(1), c(2), c(3)};
  }
};

/// Hamilton product a*b.
inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

/// Rotates v by q (computes q*v*q^-1 for unit q).
inline Vec3 quat_rotate(const Quaternion& q, const Vec3& v) {
  const Vec3 u(q.x, q.y, q.z);
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w * t + u.cross(t);
}

inline Mat3 rotation_matrix(const Quaternion& q) {
  const double ww = q.w * q.w, xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
  const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
  const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
  Mat3 r;
  r << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
      2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
      2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return r;
}

/// Exponential map: unit quaternion rotating by angle |w_dt| about w_dt.
/// Below 1e-8 rad a second-order series avoids the division by the angle.
inline Quaternion rotation_increment(const Vec3& w_dt) {
  const double angle = w_dt.norm();
  if (angle < 1e-8) {
    const Vec3 h = 0.5 * w_dt;
    return Quaternion{1.0 - 0.5 * h.squaredNorm(), h.x(), h.y(), h.z()}
        .normalized();
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return {std::cos(half), s * w_dt.x(), s * w_dt.y(), s * w_dt.z()};
}

/// Inverse of rotation_increment: the rotation vector of a unit quaternion,
/// shortest-arc branch.
inline Vec3 rotation_vector(const Quaternion& q_in) {
  Quaternion q = q_in.normalized();
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  const Vec3 v(q.x, q.y, q.z);
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(vn, q.w);
  return (angle / vn) * v;
}

/// Yaw rotation about the world z axis.
inline Quaternion quat_from_yaw(double yaw) {
  return {std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
}

/// Shortest-arc rotation taking unit vector `from` onto unit vector `to`.
inline Quaternion quat_between(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const double d = a.dot(b);
  if (d < -1.0 + 1e-12) {
    // Antipodal: rotate 180 degrees about any axis orthogonal to a.
    Vec3 axis = a.cross(Vec3::UnitX());
    if (axis.squaredNorm() < 1e-12) axis = a.cross(Vec3::UnitY());
    axis.normalize();
    return {0.0, axis.x(), axis.y(), axis.z()};
  }
  const Vec3 c = a.cross(b);
  return Quaternion{1.0 + d, c.x(), c.y(), c.z()}.normalized();
}

/// 4x4 matrix L(q) with q*r = L(q) * r for scalar-first coefficient vectors.
inline Eigen::Matrix4d left_product_matrix(const Quaternion& q) {
  Eigen::Matrix4d m;
  m << q.w, -q.x, -q.y, -q.z,
      q.x, q.w, -q.z, q.y,
      q.y, q.z, q.w, -q.x,
      q.z, -q.y, q.x, q.w;
  return m;
}

/// 4x4 matrix R(r) with q*r = R(r) * q for scalar-first coefficient vectors.
inline Eigen::Matrix4d right_product_matrix(const Quaternion& r) {
  Eigen::Matrix4d m;
  m << r.w, -r.x, -r.y, -r.z,
      r.x, r.w, r.z, -r.y,
      r.y, -r.z, r.w, r.x,
      r.z, r.y, -r.x, r.w;
  return m;
}

/// Jacobian of rotation_increment with respect to its rotation-vector input,
/// 4x3, rows ordered (w, x, y, z).
inline Eigen::Matrix<double, 4, 3> rotation_increment_jacobian(
    const Vec3& w_dt) {
  const double angle = w_dt.norm();
  double c1, c2;  // sin(a/2)/a and d(sin(a/2)/a)/da / a
  if (angle < 1e-4) {
    const double a2 = angle * angle;
    c1 = 0.5 - a2 / 48.0;
    c2 = -1.0 / 24.0 + a2 / 960.0;
  } else {
    const double half = 0.5 * angle;
    c1 = std::sin(half) / angle;
    c2 = (0.5 * angle * std::cos(half) - std::sin(half)) /
         (angle * angle * angle);
  }
  Eigen::Matrix<double, 4, 3> j;
  j.row(0) = -0.5 * c1 * w_dt.transpose();
  j.bottomRows<3>() = c1 * Mat3::Identity() + c2 * w_dt * w_dt.transpose();
  return j;
}

/// Jacobian of quat_rotate(q, v) with respect to the quaternion coefficients,
/// 3x4, columns ordered (w, x, y, z).  Valid at unit q.
inline Eigen::Matrix<double, 3, 4> rotate_jacobian_wrt_quat(
    const Quaternion& q, const Vec3& v) {
  const Vec3 u(q.x, q.y, q.z);
  Eigen::Matrix<double, 3, 4> j;
  j.col(0) = 2.0 * (q.w * v + u.cross(v));
  j.block<3, 3>(0, 1) = 2.0 * (-v * u.transpose() + u * v.transpose() +
                               u.dot(v) * Mat3::Identity());
  j.block<3, 3>(0, 1) -= 2.0 * q.w * (Mat3() << 0, -v.z(), v.y(),
                                      v.z(), 0, -v.x(),
                                      -v.y(), v.x(), 0)
                                         .finished();
  return j;
}

}  // namespace pathfuse
