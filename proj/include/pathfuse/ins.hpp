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

#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "pathfuse/nav_state.hpp"
#include "pathfuse/quaternion.hpp"

namespace pathfuse {

/// Applies the calibration model to a raw sample: a = diag(t_a)*a_raw - b_a,
/// w = w_raw - b_w.
inline std::pair<Vec3, Vec3> calibrate_imu(const ImuSample& sample,
                                           const NavState& state) {
  return {state.accel_scale.cwiseProduct(sample.accel) - state.accel_bias,
          sample.gyro - state.gyro_bias};
}

/// One strapdown mechanization step.  The discretization order is fixed:
/// the orientation is advanced first, the velocity uses the new orientation,
/// and the position uses the previous velocity.  Bias and scale sub-states
/// are constant.  The output orientation is renormalized.
inline NavState propagate(const NavState& state, const ImuSample& sample,
                          double dt, const Vec3& gravity) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
  const auto [accel, gyro] = calibrate_imu(sample, state);

  NavState next = state;
  next.orientation =
      quat_mul(state.orientation, rotation_increment(gyro * dt)).normalized();
  next.velocity =
      state.velocity + (quat_rotate(next.orientation, accel) - gravity) * dt;
  next.position = state.position + state.velocity * dt;
  return next;
}

/// Jacobians of the mechanization step at (state, zero noise): F_x (19x19)
/// with respect to the state and F_eps (19x6) with respect to the stacked
/// (accelerometer, gyroscope) noise.  F_x includes the effect of the
/// quaternion renormalization so it matches finite differences of propagate.
inline std::pair<Mat19, Mat19x6> dynamics_jacobians(const NavState& state,
                                                    const ImuSample& sample,
                                                    double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dynamics_jacobians: dt must be > 0");
  }
  const auto [accel, gyro] = calibrate_imu(sample, state);
  const Quaternion incr = rotation_increment(gyro * dt);
  const Quaternion q_new = quat_mul(state.orientation, incr).normalized();

  // Normalization projector at the (unit) product quaternion.
  const Eigen::Vector4d qc = q_new.coeffs();
  const Eigen::Matrix4d proj = Eigen::Matrix4d::Identity() - qc * qc.transpose();

  // d q_new / d q_old and d q_new / d b_w.
  const Eigen::Matrix4d dq_dqold = proj * right_product_matrix(incr);
  const Eigen::Matrix<double, 4, 3> dq_dbw =
      proj * left_product_matrix(state.orientation) *
      rotation_increment_jacobian(gyro * dt) * (-dt);

  // d (R(q_new) a) / d q_new, evaluated on the unit sphere.
  const Eigen::Matrix<double, 3, 4> drot_dq =
      rotate_jacobian_wrt_quat(q_new, accel);
  const Mat3 r_new = rotation_matrix(q_new);

  Mat19 f_x = Mat19::Identity();
  f_x.block<3, 3>(kIdxPos, kIdxVel) = dt * Mat3::Identity();
  f_x.block<3, 4>(kIdxVel, kIdxQuat) = dt * drot_dq * dq_dqold;
  f_x.block<3, 3>(kIdxVel, kIdxAccelBias) = -dt * r_new;
  f_x.block<3, 3>(kIdxVel, kIdxGyroBias) = dt * drot_dq * dq_dbw;
  f_x.block<3, 3>(kIdxVel, kIdxAccelScale) =
      dt * r_new * sample.accel.asDiagonal();
  f_x.block<4, 4>(kIdxQuat, kIdxQuat) = dq_dqold;
  f_x.block<4, 3>(kIdxQuat, kIdxGyroBias) = dq_dbw;

  // Noise enters the velocity row through the rotated accelerometer noise and
  // the orientation row through the rotation increment; cross-couplings are
  // second order and left out.
  Mat19x6 f_eps = Mat19x6::Zero();
  f_eps.block<3, 3>(kIdxVel, 0) = dt * r_new;
  f_eps.block<4, 3>(kIdxQuat, 3) =
      proj * left_product_matrix(state.orientation) *
      rotation_increment_jacobian(gyro * dt) * dt;
  return {f_x, f_eps};
}

}  // namespace pathfuse
