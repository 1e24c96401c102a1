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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "pathfuse/fusion.hpp"
#include "pathfuse/trajectory.hpp"

namespace pathfuse {

/// Piecewise-linear resampling of positions at the requested times.
/// Extrapolation outside the track span is rejected.
inline Trajectory resample(const Trajectory& track,
                           const std::vector<double>& times) {
  track.validate();
  const double eps = 1e-9;
  Trajectory out;
  out.samples.reserve(times.size());
  std::size_t hint = 0;
  for (double t : times) {
    if (t < track.start_time() - eps || t > track.end_time() + eps) {
      throw std::invalid_argument("resample: time outside track span");
    }
    const double tc = std::clamp(t, track.start_time(), track.end_time());
    while (hint + 2 < track.samples.size() && track.samples[hint + 1].t < tc) {
      ++hint;
    }
    // `times` may be unsorted; fall back to a search when the hint is stale.
    std::size_t i = hint;
    if (track.samples[i].t > tc) {
      i = 0;
      hint = 0;
    }
    while (i + 2 < track.samples.size() && track.samples[i + 1].t < tc) ++i;
    const TrajectorySample& a = track.samples[i];
    const TrajectorySample& b = track.samples[i + 1];
    const double w = (tc - a.t) / (b.t - a.t);
    TrajectorySample s;
    s.t = t;
    s.position = (1.0 - w) * a.position + w * b.position;
    out.samples.push_back(s);
  }
  return out;
}

/// Least-squares rigid transform (rotation + translation, no scale) taking
/// `src` onto `dst`; Kabsch with a proper-rotation constraint.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  bool degenerate = false;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

inline RigidTransform rigid_align(const std::vector<Vec3>& src,
                                  const std::vector<Vec3>& dst) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("rigid_align: size mismatch");
  }
  if (src.size() < 3) {
    throw std::invalid_argument("rigid_align: needs at least 3 points");
  }
  const double n = static_cast<double>(src.size());
  Vec3 c_src = Vec3::Zero(), c_dst = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    c_src += src[i];
    c_dst += dst[i];
  }
  c_src /= n;
  c_dst /= n;

  Mat3 cross = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cross += (dst[i] - c_dst) * (src[i] - c_src).transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  RigidTransform out;
  out.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  out.translation = c_dst - out.rotation * c_src;
  // Rank < 2 leaves the rotation underdetermined (collinear or coincident
  // points); report the best fit with a degeneracy flag.
  const Vec3 sv = svd.singularValues();
  const double scale = std::max(sv(0), 1e-300);
  out.degenerate = sv(1) / scale < 1e-9;
  return out;
}

inline double rigid_alignment_rmse(const std::vector<Vec3>& src,
                                   const std::vector<Vec3>& dst,
                                   const RigidTransform& transform) {
  double sq = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    sq += (transform.apply(src[i]) - dst[i]).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(src.size()));
}

/// Scaled Aligned RMSE curve: per-timescale averages of rigidly aligned
/// segment errors.
struct SarmseCurve {
  std::vector<double> scales;       // s
  std::vector<double> errors;       // m
  std::vector<int> segment_counts;  // N per scale
  std::vector<double> skipped_scales;  // longer than the overlap
};

inline std::vector<double> default_sarmse_scales(double duration,
                                                 int count = 10) {
  std::vector<double> scales;
  const double lo = 1.0;
  const double hi = std::max(duration, 1.5);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    scales.push_back(lo * std::pow(hi / lo, f));
  }
  return scales;
}

/// Computes the SARMSE curve of `test` against `gt`.  Both tracks are first
/// resampled onto a common uniform grid over their time overlap.  For every
/// scale, windows of that duration slide with the given stride; each test
/// segment is rigidly aligned to the matching ground-truth segment and the
/// post-alignment RMSE is averaged over segments.  Stride <= 0 selects the
/// default of a quarter scale.
inline SarmseCurve sarmse(const Trajectory& gt, const Trajectory& test,
                          const std::vector<double>& scales,
                          double stride = 0.0) {
  gt.validate();
  test.validate();
  const double t0 = std::max(gt.start_time(), test.start_time());
  const double t1 = std::min(gt.end_time(), test.end_time());
  if (!(t1 > t0)) {
    throw std::invalid_argument("sarmse: tracks do not overlap in time");
  }

  // Common grid at the ground-truth median sampling interval.
  std::vector<double> dts;
  for (std::size_t i = 1; i < gt.samples.size(); ++i) {
    dts.push_back(gt.samples[i].t - gt.samples[i - 1].t);
  }
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  const double grid_dt = dts[dts.size() / 2];
  std::vector<double> grid;
  for (double t = t0; t <= t1 + 1e-12; t += grid_dt) grid.push_back(t);
  if (grid.size() < 3) {
    throw std::invalid_argument("sarmse: overlap too short for the grid");
  }

  const Trajectory gt_r = resample(gt, grid);
  const Trajectory test_r = resample(test, grid);

  SarmseCurve out;
  for (double scale : scales) {
    if (scale > t1 - t0 + 1e-9) {
      out.skipped_scales.push_back(scale);
      continue;
    }
    const double step = stride > 0.0 ? stride : 0.25 * scale;
    double err_sum = 0.0;
    int count = 0;
    for (double ws = t0; ws + scale <= t1 + 1e-9; ws += step) {
      const auto lo_it = std::lower_bound(grid.begin(), grid.end(), ws - 1e-12);
      const auto hi_it =
          std::upper_bound(grid.begin(), grid.end(), ws + scale + 1e-12);
      const std::size_t lo = static_cast<std::size_t>(lo_it - grid.begin());
      const std::size_t hi = static_cast<std::size_t>(hi_it - grid.begin());
      if (hi - lo < 3) continue;
      std::vector<Vec3> seg_test, seg_gt;
      seg_test.reserve(hi - lo);
      seg_gt.reserve(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) {
        seg_test.push_back(test_r.samples[i].position);
        seg_gt.push_back(gt_r.samples[i].position);
      }
      const RigidTransform tf = rigid_align(seg_test, seg_gt);
      err_sum += rigid_alignment_rmse(seg_test, seg_gt, tf);
      ++count;
    }
    if (count == 0) {
      out.skipped_scales.push_back(scale);
      continue;
    }
    out.scales.push_back(scale);
    out.errors.push_back(err_sum / count);
    out.segment_counts.push_back(count);
  }
  return out;
}

/// Pointwise position error aggregates on a common grid, no alignment.
/// The test track is resampled at the ground-truth timestamps inside the
/// overlap.
inline std::pair<double, double> rmse_mae(const Trajectory& gt,
                                          const Trajectory& test) {
  gt.validate();
  test.validate();
  const double t0 = std::max(gt.start_time(), test.start_time());
  const double t1 = std::min(gt.end_time(), test.end_time());
  if (!(t1 >= t0)) {
    throw std::invalid_argument("rmse_mae: tracks do not overlap in time");
  }
  std::vector<double> times;
  std::vector<Vec3> gt_pos;
  for (const auto& s : gt.samples) {
    if (s.t >= t0 - 1e-12 && s.t <= t1 + 1e-12) {
      times.push_back(s.t);
      gt_pos.push_back(s.position);
    }
  }
  if (times.empty()) {
    throw std::invalid_argument("rmse_mae: no ground-truth samples in overlap");
  }
  const Trajectory test_r = resample(test, times);
  double sq = 0.0, abs = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double e = (test_r.samples[i].position - gt_pos[i]).norm();
    sq += e * e;
    abs += e;
  }
  const double n = static_cast<double>(times.size());
  return {std::sqrt(sq / n), abs / n};
}

/// Straight-line interpolation between position fixes, the naive baseline.
/// Evaluation times outside the fix span clamp to the end fixes; `clamped`
/// reports how many did.
struct BaselineResult {
  Trajectory trajectory;
  int clamped = 0;
};

inline BaselineResult line_interpolation_baseline(
    const std::vector<Measurement>& fixes, const std::vector<double>& times) {
  std::vector<std::pair<double, Vec3>> pts;
  for (const auto& m : fixes) {
    if (m.kind == MeasurementKind::position3d) {
      pts.emplace_back(m.t, Vec3(m.value(0), m.value(1), m.value(2)));
    } else if (m.kind == MeasurementKind::position2d) {
      pts.emplace_back(m.t, Vec3(m.value(0), m.value(1), 0.0));
    }
  }
  if (pts.size() < 2) {
    throw std::invalid_argument(
        "line_interpolation_baseline: needs at least 2 fixes");
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  BaselineResult out;
  out.trajectory.samples.reserve(times.size());
  for (double t : times) {
    TrajectorySample s;
    s.t = t;
    if (t <= pts.front().first) {
      s.position = pts.front().second;
      if (t < pts.front().first - 1e-12) ++out.clamped;
    } else if (t >= pts.back().first) {
      s.position = pts.back().second;
      if (t > pts.back().first + 1e-12) ++out.clamped;
    } else {
      std::size_t i = 0;
      while (i + 2 < pts.size() && pts[i + 1].first < t) ++i;
      const double w = (t - pts[i].first) / (pts[i + 1].first - pts[i].first);
      s.position = (1.0 - w) * pts[i].second + w * pts[i + 1].second;
    }
    out.trajectory.samples.push_back(s);
  }
  return out;
}

/// Converts an iteration's pose estimates into a metrics trajectory.
inline Trajectory to_trajectory(const std::vector<PoseEstimate>& poses) {
  Trajectory out;
  out.samples.reserve(poses.size());
  for (const auto& p : poses) {
    TrajectorySample s;
    s.t = p.t;
    s.position = p.position;
    s.orientation = p.orientation;
    s.position_cov = p.position_cov;
    out.samples.push_back(s);
  }
  return out;
}

}  // namespace pathfuse
