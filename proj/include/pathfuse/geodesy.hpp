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
#include <stdexcept>

#include <Eigen/Core>

#include "pathfuse/quaternion.hpp"

namespace pathfuse {

// WGS84 defining constants.
inline constexpr double kWgs84SemiMajorAxis = 6378137.0;
inline constexpr double kWgs84Flattening = 1.0 / 298.257223563;
inline constexpr double kWgs84EccSq =
    kWgs84Flattening * (2.0 - kWgs84Flattening);

inline constexpr double kDegToRad = M_PI / 180.0;
inline constexpr double kRadToDeg = 180.0 / M_PI;

/// Geodetic coordinate on the WGS84 ellipsoid.  Altitudes are treated as
/// ellipsoidal heights.
struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;

  bool valid() const {
    return std::isfinite(latitude_deg) && std::isfinite(longitude_deg) &&
           std::isfinite(altitude_m) && std::abs(latitude_deg) <= 90.0 &&
           std::abs(longitude_deg) <= 180.0;
  }
};

inline Vec3 wgs84_to_ecef(const GeoPoint& p) {
  if (!p.valid()) throw std::invalid_argument("wgs84_to_ecef: invalid point");
  const double lat = p.latitude_deg * kDegToRad;
  const double lon = p.longitude_deg * kDegToRad;
  const double slat = std::sin(lat), clat = std::cos(lat);
  const double n = kWgs84SemiMajorAxis / std::sqrt(1.0 - kWgs84EccSq * slat * slat);
  return {(n + p.altitude_m) * clat * std::cos(lon),
          (n + p.altitude_m) * clat * std::sin(lon),
          (n * (1.0 - kWgs84EccSq) + p.altitude_m) * slat};
}

inline GeoPoint ecef_to_wgs84(const Vec3& ecef) {
  const double x = ecef.x(), y = ecef.y(), z = ecef.z();
  const double lon = std::atan2(y, x);
  const double rho = std::hypot(x, y);
  // Fixed-point iteration on latitude; converges to sub-micrometer in a few
  // rounds for near-surface points.
  double lat = std::atan2(z, rho * (1.0 - kWgs84EccSq));
  double alt = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double slat = std::sin(lat);
    const double n =
        kWgs84SemiMajorAxis / std::sqrt(1.0 - kWgs84EccSq * slat * slat);
    alt = rho / std::cos(lat) - n;
    lat = std::atan2(z, rho * (1.0 - kWgs84EccSq * n / (n + alt)));
  }
  return {lat * kRadToDeg, lon * kRadToDeg, alt};
}

/// Local East-North-Up tangent frame.  The origin is fixed for the lifetime
/// of one reconstruction run (anchored at the first accepted GNSS fix).
class EnuFrame {
 public:
  EnuFrame() : EnuFrame(GeoPoint{}) {}

  explicit EnuFrame(const GeoPoint& origin) : origin_(origin) {
    if (!origin.valid()) throw std::invalid_argument("EnuFrame: invalid origin");
    origin_ecef_ = wgs84_to_ecef(origin);
    const double lat = origin.latitude_deg * kDegToRad;
    const double lon = origin.longitude_deg * kDegToRad;
    const double slat = std::sin(lat), clat = std::cos(lat);
    const double slon = std::sin(lon), clon = std::cos(lon);
    ecef_to_enu_ << -slon, clon, 0.0,
        -slat * clon, -slat * slon, clat,
        clat * clon, clat * slon, slat;
  }

  const GeoPoint& origin() const { return origin_; }

  Vec3 to_enu(const GeoPoint& p) const {
    return ecef_to_enu_ * (wgs84_to_ecef(p) - origin_ecef_);
  }

  GeoPoint to_wgs84(const Vec3& enu) const {
    return ecef_to_wgs84(origin_ecef_ + ecef_to_enu_.transpose() * enu);
  }

 private:
  GeoPoint origin_;
  Vec3 origin_ecef_;
  Mat3 ecef_to_enu_;
};

inline Vec3 wgs84_to_enu(const GeoPoint& p, const EnuFrame& frame) {
  return frame.to_enu(p);
}

inline GeoPoint enu_to_wgs84(const Vec3& enu, const EnuFrame& frame) {
  return frame.to_wgs84(enu);
}

}  // namespace pathfuse
