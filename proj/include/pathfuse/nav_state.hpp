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

#include <Eigen/Core>

#include "pathfuse/quaternion.hpp"

namespace pathfuse {

inline constexpr int kStateDim = 19;
inline constexpr int kNoiseDim = 6;

using Vec19 = Eigen::Matrix<double, kStateDim, 1>;
using Mat19 = Eigen::Matrix<double, kStateDim, kStateDim>;
using Mat19x6 = Eigen::Matrix<double, kStateDim, kNoiseDim>;

// Offsets of the sub-states in the flattened vector
// [p, v, q, b_a, b_w, t_a].
inline constexpr int kIdxPos = 0;
inline constexpr int kIdxVel = 3;
inline constexpr int kIdxQuat = 6;
inline constexpr int kIdxAccelBias = 10;
inline constexpr int kIdxGyroBias = 13;
inline constexpr int kIdxAccelScale = 16;

/// Full navigation state: position and velocity in the local ENU frame,
/// body-to-world orientation, additive IMU biases, and the diagonal of the
/// multiplicative accelerometer scale.
struct NavState {
  Vec3 position = Vec3::Zero();           // m, ENU
  Vec3 velocity = Vec3::Zero();           // m/s
  Quaternion orientation;                 // body-to-world, unit
  Vec3 accel_bias = Vec3::Zero();         // m/s^2
  Vec3 gyro_bias = Vec3::Zero();          // rad/s
  Vec3 accel_scale = Vec3::Ones();        // dimensionless, diag of T^a

  Vec19 flatten() const {
    Vec19 x;
    x.segment<3>(kIdxPos) = position;
    x.segment<3>(kIdxVel) = velocity;
    x.segment<4>(kIdxQuat) = orientation.coeffs();
    x.segment<3>(kIdxAccelBias) = accel_bias;
    x.segment<3>(kIdxGyroBias) = gyro_bias;
    x.segment<3>(kIdxAccelScale) = accel_scale;
    return x;
  }

  static NavState unflatten(const Vec19& x) {
    NavState s;
    s.position = x.segment<3>(kIdxPos);
    s.velocity = x.segment<3>(kIdxVel);
    s.orientation = Quaternion::from_coeffs(x.segment<4>(kIdxQuat));
    s.accel_bias = x.segment<3>(kIdxAccelBias);
    s.gyro_bias = x.segment<3>(kIdxGyroBias);
    s.accel_scale = x.segment<3>(kIdxAccelScale);
    return s;
  }

  /// Checks the state invariants: unit orientation and sane scale factors.
  void validate() const {
    if (std::abs(orientation.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("NavState: orientation is not unit norm");
    }
    for (int i = 0; i < 3; ++i) {
      if (!(accel_scale(i) > 0.5 && accel_scale(i) < 1.5)) {
        throw std::invalid_argument(
            "NavState: accelerometer scale outside (0.5, 1.5)");
      }
    }
  }
};

/// One raw IMU row: specific force and angular rate in the body frame.
struct ImuSample {
  double t = 0.0;             // s
  Vec3 accel = Vec3::Zero();  // m/s^2, raw accelerometer
  Vec3 gyro = Vec3::Zero();   // rad/s, raw gyroscope
};

/// Constants shared by mechanization and filtering: the gravity vector in the
/// ENU frame and the IMU noise densities in per-step scaled form (the process
/// noise over a step of length dt is Sigma * dt).
struct InsConstants {
  Vec3 gravity = Vec3(0.0, 0.0, 9.80665);  // m/s^2, ENU up
  Mat3 accel_noise = Mat3::Identity() * (0.07 * 0.07);  // (m/s^2)^2
  Mat3 gyro_noise = Mat3::Identity() * (0.01 * 0.01);   // (rad/s)^2
};

}  // namespace pathfuse
