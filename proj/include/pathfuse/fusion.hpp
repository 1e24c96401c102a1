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
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "pathfuse/ins.hpp"
#include "pathfuse/kalman.hpp"
#include "pathfuse/nav_state.hpp"

namespace pathfuse {

/// Gaussian belief over the flattened navigation state.
struct GaussianEstimate {
  Vec19 mean = NavState{}.flatten();
  Mat19 cov = Mat19::Identity();

  NavState state() const { return NavState::unflatten(mean); }
};

enum class MeasurementKind { position3d, position2d, height, zupt, speed_limit };

inline int measurement_dim(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::position3d: return 3;
    case MeasurementKind::position2d: return 2;
    case MeasurementKind::height: return 1;
    case MeasurementKind::zupt: return 3;
    case MeasurementKind::speed_limit: return 1;
  }
  return 0;
}

inline const char* measurement_kind_name(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::position3d: return "position3d";
    case MeasurementKind::position2d: return "position2d";
    case MeasurementKind::height: return "height";
    case MeasurementKind::zupt: return "zupt";
    case MeasurementKind::speed_limit: return "speed_limit";
  }
  return "unknown";
}

/// Timestamped observation with its noise covariance.
struct Measurement {
  double t = 0.0;
  MeasurementKind kind = MeasurementKind::position3d;
  Eigen::VectorXd value;
  Eigen::MatrixXd noise;

  void validate() const {
    const int d = measurement_dim(kind);
    if (value.size() != d || noise.rows() != d || noise.cols() != d) {
      throw std::invalid_argument("Measurement: dimension mismatch for " +
                                  std::string(measurement_kind_name(kind)));
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetrized(noise));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 0.0) {
      throw std::invalid_argument("Measurement: noise must be positive definite");
    }
  }
};

inline Measurement make_position3d(double t, const Vec3& p, double sigma) {
  Measurement m;
  m.t = t;
  m.kind = MeasurementKind::position3d;
  m.value = p;
  m.noise = sigma * sigma * Eigen::Matrix3d::Identity();
  return m;
}

inline Measurement make_position2d(double t, const Eigen::Vector2d& p,
                                   double sigma) {
  Measurement m;
  m.t = t;
  m.kind = MeasurementKind::position2d;
  m.value = p;
  m.noise = sigma * sigma * Eigen::Matrix2d::Identity();
  return m;
}

inline Measurement make_height(double t, double z, double sigma) {
  Measurement m;
  m.t = t;
  m.kind = MeasurementKind::height;
  m.value = Eigen::VectorXd::Constant(1, z);
  m.noise = Eigen::MatrixXd::Constant(1, 1, sigma * sigma);
  return m;
}

inline Measurement make_zupt(double t, double sigma) {
  Measurement m;
  m.t = t;
  m.kind = MeasurementKind::zupt;
  m.value = Vec3::Zero();
  m.noise = sigma * sigma * Eigen::Matrix3d::Identity();
  return m;
}

/// Priors, noise parameters, and iteration policy for one reconstruction.
struct FusionConfig {
  GaussianEstimate prior;
  InsConstants constants;

  int max_iterations = 20;        // total forward/backward passes
  double convergence_tol = 0.01;  // m, max smoothed-position change

  bool speed_limit_enabled = true;
  double speed_limit = 3.5;        // m/s
  double speed_limit_sigma = 0.5;  // m/s

  double accuracy_to_sigma = 0.5;  // GNSS accuracy radius -> sigma factor
  bool nlpd_use_filtered = false;

  void validate() const {
    if (max_iterations < 1) {
      throw std::invalid_argument("FusionConfig: max_iterations must be >= 1");
    }
    if (!(convergence_tol > 0.0)) {
      throw std::invalid_argument("FusionConfig: convergence_tol must be > 0");
    }
  }
};

/// Default prior covariance; every entry is config-exposed because the model
/// is sensitive to these choices.
struct PriorSigmas {
  double position = 10.0;
  double velocity = 1.0;
  double quaternion = 1e-2;
  double accel_bias = 0.1;
  double gyro_bias = 0.01;
  double accel_scale = 0.05;

  Mat19 covariance() const {
    Vec19 d;
    d.segment<3>(kIdxPos).setConstant(position * position);
    d.segment<3>(kIdxVel).setConstant(velocity * velocity);
    d.segment<4>(kIdxQuat).setConstant(quaternion * quaternion);
    d.segment<3>(kIdxAccelBias).setConstant(accel_bias * accel_bias);
    d.segment<3>(kIdxGyroBias).setConstant(gyro_bias * gyro_bias);
    d.segment<3>(kIdxAccelScale).setConstant(accel_scale * accel_scale);
    return d.asDiagonal();
  }
};

/// EKF prediction step: the mean runs through the mechanization with zero
/// noise, the covariance through the linearized dynamics with
/// Q = blkdiag(Sigma_a dt, Sigma_w dt).
inline GaussianEstimate ekf_predict(const GaussianEstimate& est,
                                    const ImuSample& sample, double dt,
                                    const InsConstants& c) {
  const NavState state = est.state();
  const auto [f_x, f_eps] = dynamics_jacobians(state, sample, dt);

  GaussianEstimate out;
  out.mean = propagate(state, sample, dt, c.gravity).flatten();

  Eigen::Matrix<double, kNoiseDim, kNoiseDim> q =
      Eigen::Matrix<double, kNoiseDim, kNoiseDim>::Zero();
  q.topLeftCorner<3, 3>() = c.accel_noise * dt;
  q.bottomRightCorner<3, 3>() = c.gyro_noise * dt;

  out.cov = symmetrized(f_x * est.cov * f_x.transpose() +
                        f_eps * q * f_eps.transpose());
  if (!out.cov.allFinite()) {
    throw std::runtime_error("ekf_predict: covariance is not finite");
  }
  return out;
}

/// Linearized measurement model.  `valid` is false when the model is
/// undefined at the current state (speed constraint at near-zero speed).
struct MeasurementModel {
  Eigen::VectorXd predicted;
  Eigen::Matrix<double, Eigen::Dynamic, kStateDim> jacobian;
  bool valid = true;
};

inline MeasurementModel measurement_model(MeasurementKind kind,
                                          const GaussianEstimate& est,
                                          const FusionConfig& config) {
  (void)config;
  MeasurementModel m;
  const int d = measurement_dim(kind);
  m.predicted.resize(d);
  m.jacobian.setZero(d, kStateDim);
  switch (kind) {
    case MeasurementKind::position3d:
      m.predicted = est.mean.segment<3>(kIdxPos);
      m.jacobian.block<3, 3>(0, kIdxPos).setIdentity();
      break;
    case MeasurementKind::position2d:
      m.predicted = est.mean.segment<2>(kIdxPos);
      m.jacobian.block<2, 2>(0, kIdxPos).setIdentity();
      break;
    case MeasurementKind::height:
      m.predicted(0) = est.mean(kIdxPos + 2);
      m.jacobian(0, kIdxPos + 2) = 1.0;
      break;
    case MeasurementKind::zupt:
      m.predicted = est.mean.segment<3>(kIdxVel);
      m.jacobian.block<3, 3>(0, kIdxVel).setIdentity();
      break;
    case MeasurementKind::speed_limit: {
      const Vec3 v = est.mean.segment<3>(kIdxVel);
      const double speed = v.norm();
      if (speed < 1e-6) {
        m.valid = false;
        break;
      }
      m.predicted(0) = speed;
      m.jacobian.block<1, 3>(0, kIdxVel) = v.transpose() / speed;
      break;
    }
  }
  return m;
}

struct UpdateResult {
  GaussianEstimate estimate;
  Eigen::VectorXd innovation;
  Eigen::MatrixXd innovation_cov;
  bool applied = true;
};

/// Joseph-form EKF update.  Speed-limit measurements are one-sided: they are
/// applied only while the predicted speed exceeds the configured limit.
inline UpdateResult ekf_update(const GaussianEstimate& est,
                               const Measurement& meas,
                               const FusionConfig& config) {
  meas.validate();
  UpdateResult out;
  out.estimate = est;

  const MeasurementModel model = measurement_model(meas.kind, est, config);
  if (!model.valid) {
    out.applied = false;
    return out;
  }
  if (meas.kind == MeasurementKind::speed_limit &&
      model.predicted(0) <= config.speed_limit) {
    out.applied = false;
    return out;
  }

  const Eigen::VectorXd innovation = meas.value - model.predicted;
  const auto res =
      kalman_update(est.mean, est.cov, innovation, model.jacobian, meas.noise);

  out.estimate.mean = res.mean;
  out.estimate.mean.segment<4>(kIdxQuat) =
      Quaternion::from_coeffs(res.mean.segment<4>(kIdxQuat))
          .normalized()
          .coeffs();
  out.estimate.cov = res.cov;
  out.innovation = innovation;
  out.innovation_cov = res.innovation_cov;
  return out;
}

/// One record of the forward pass: predicted and filtered moments plus the
/// linearization inputs of the step that produced the prediction.
struct FilterStep {
  double t = 0.0;
  double dt = 0.0;
  ImuSample sample;
  bool inserted = false;  // extra step created for an off-grid measurement
  Vec19 mean_pred;
  Mat19 cov_pred;
  Vec19 mean_filt;
  Mat19 cov_filt;
  Mat19 transition = Mat19::Identity();  // from previous filtered state
  int measurements_applied = 0;
};

struct FilterHistory {
  std::vector<FilterStep> steps;
  std::size_t dropped_measurements = 0;  // outside the IMU time span
  std::size_t skipped_updates = 0;       // one-sided or undefined models
};

namespace detail {

inline double median_dt(const std::vector<ImuSample>& imu) {
  std::vector<double> dts;
  dts.reserve(imu.size());
  for (std::size_t i = 1; i < imu.size(); ++i) {
    dts.push_back(imu[i].t - imu[i - 1].t);
  }
  if (dts.empty()) return 0.0;
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  return dts[dts.size() / 2];
}

inline void apply_measurement(GaussianEstimate& est, const Measurement& meas,
                              const FusionConfig& config, FilterStep& step,
                              FilterHistory& hist) {
  const UpdateResult res = ekf_update(est, meas, config);
  if (res.applied) {
    est = res.estimate;
    ++step.measurements_applied;
  } else {
    ++hist.skipped_updates;
  }
}

inline void maybe_apply_speed_limit(GaussianEstimate& est,
                                    const FusionConfig& config,
                                    FilterStep& step, FilterHistory& hist) {
  if (!config.speed_limit_enabled) return;
  if (est.mean.segment<3>(kIdxVel).norm() <= config.speed_limit) return;
  Measurement m;
  m.t = step.t;
  m.kind = MeasurementKind::speed_limit;
  m.value = Eigen::VectorXd::Constant(1, config.speed_limit);
  m.noise = Eigen::MatrixXd::Constant(
      1, 1, config.speed_limit_sigma * config.speed_limit_sigma);
  apply_measurement(est, m, config, step, hist);
}

}  // namespace detail

/// EKF forward pass over the merged IMU/measurement timeline.  Measurements
/// snap to the nearest IMU timestamp when within half the median sample
/// interval; otherwise a dedicated propagation step is inserted at the
/// measurement time.  A measurement at time t is applied after the predict
/// that reaches t.
inline FilterHistory forward_pass(const std::vector<ImuSample>& imu,
                                  const std::vector<Measurement>& meas,
                                  const GaussianEstimate& prior,
                                  const FusionConfig& config) {
  if (imu.empty()) {
    throw std::invalid_argument("forward_pass: empty IMU stream");
  }
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (!(imu[i].t > imu[i - 1].t)) {
      throw std::invalid_argument(
          "forward_pass: IMU timestamps must be strictly increasing");
    }
  }

  FilterHistory hist;
  const double snap_tol = 0.5 * detail::median_dt(imu);
  const double t_begin = imu.front().t;
  const double t_end = imu.back().t;

  // Assign each measurement either to an IMU sample index or to an inserted
  // step inside a gap (keyed by the index of the sample that closes the gap).
  std::vector<std::vector<std::size_t>> at_sample(imu.size());
  std::vector<std::vector<std::pair<double, std::size_t>>> in_gap(imu.size());
  for (std::size_t j = 0; j < meas.size(); ++j) {
    const double t = meas[j].t;
    if (t < t_begin - snap_tol || t > t_end + snap_tol) {
      ++hist.dropped_measurements;
      continue;
    }
    const auto it = std::lower_bound(
        imu.begin(), imu.end(), t,
        [](const ImuSample& s, double value) { return s.t < value; });
    std::size_t hi = static_cast<std::size_t>(it - imu.begin());
    if (hi >= imu.size()) hi = imu.size() - 1;
    const std::size_t lo = hi > 0 ? hi - 1 : 0;
    const std::size_t nearest =
        std::abs(imu[lo].t - t) <= std::abs(imu[hi].t - t) ? lo : hi;
    if (std::abs(imu[nearest].t - t) <= snap_tol) {
      at_sample[nearest].push_back(j);
    } else {
      in_gap[hi].emplace_back(t, j);
    }
  }
  for (auto& gap : in_gap) {
    std::stable_sort(gap.begin(), gap.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  GaussianEstimate est = prior;
  est.state().validate();

  hist.steps.reserve(imu.size() + meas.size());
  {
    FilterStep step;
    step.t = imu.front().t;
    step.sample = imu.front();
    step.mean_pred = est.mean;
    step.cov_pred = est.cov;
    detail::maybe_apply_speed_limit(est, config, step, hist);
    for (std::size_t j : at_sample[0]) {
      detail::apply_measurement(est, meas[j], config, step, hist);
    }
    step.mean_filt = est.mean;
    step.cov_filt = est.cov;
    hist.steps.push_back(std::move(step));
  }

  for (std::size_t i = 1; i < imu.size(); ++i) {
    double t_prev = hist.steps.back().t;
    for (const auto& [tm, j] : in_gap[i]) {
      const double dt = tm - t_prev;
      if (dt <= 0.0) {
        // Coincides with the previous event; update in place.
        detail::apply_measurement(est, meas[j], config, hist.steps.back(), hist);
        hist.steps.back().mean_filt = est.mean;
        hist.steps.back().cov_filt = est.cov;
        continue;
      }
      FilterStep step;
      step.t = tm;
      step.dt = dt;
      step.sample = imu[i];
      step.inserted = true;
      const auto [f_x, f_eps] = dynamics_jacobians(est.state(), imu[i], dt);
      (void)f_eps;
      step.transition = f_x;
      est = ekf_predict(est, imu[i], dt, config.constants);
      step.mean_pred = est.mean;
      step.cov_pred = est.cov;
      detail::maybe_apply_speed_limit(est, config, step, hist);
      detail::apply_measurement(est, meas[j], config, step, hist);
      step.mean_filt = est.mean;
      step.cov_filt = est.cov;
      t_prev = tm;
      hist.steps.push_back(std::move(step));
    }

    FilterStep step;
    step.t = imu[i].t;
    step.dt = imu[i].t - t_prev;
    step.sample = imu[i];
    const auto [f_x, f_eps] = dynamics_jacobians(est.state(), imu[i], step.dt);
    (void)f_eps;
    step.transition = f_x;
    est = ekf_predict(est, imu[i], step.dt, config.constants);
    step.mean_pred = est.mean;
    step.cov_pred = est.cov;
    detail::maybe_apply_speed_limit(est, config, step, hist);
    for (std::size_t j : at_sample[i]) {
      detail::apply_measurement(est, meas[j], config, step, hist);
    }
    step.mean_filt = est.mean;
    step.cov_filt = est.cov;
    hist.steps.push_back(std::move(step));
  }
  return hist;
}

/// Smoothed belief at one step.  The full covariance is kept only on
/// request; the position/velocity block and the trace cover the metrics and
/// diagnostics the rest of the pipeline needs.
struct SmoothedStep {
  double t = 0.0;
  Vec19 mean;
  Eigen::Matrix<double, 6, 6> posvel_cov;
  double cov_trace = 0.0;
};

struct SmoothedHistory {
  std::vector<SmoothedStep> steps;
  std::vector<Mat19> full_covs;  // only when requested
  std::size_t regularized_steps = 0;
};

/// Backward Rauch-Tung-Striebel recursion over a complete forward history.
/// At the last step the smoothed moments equal the filtered moments exactly.
inline SmoothedHistory rts_smooth(const FilterHistory& hist,
                                  bool keep_full_covariance = false) {
  if (hist.steps.empty()) {
    throw std::invalid_argument("rts_smooth: empty history");
  }
  const std::size_t n = hist.steps.size();
  SmoothedHistory out;
  out.steps.resize(n);
  if (keep_full_covariance) out.full_covs.resize(n);

  Vec19 mean_next = hist.steps[n - 1].mean_filt;
  Mat19 cov_next = hist.steps[n - 1].cov_filt;
  auto record = [&](std::size_t k, const Vec19& m, const Mat19& p) {
    out.steps[k].t = hist.steps[k].t;
    out.steps[k].mean = m;
    out.steps[k].posvel_cov = p.topLeftCorner<6, 6>();
    out.steps[k].cov_trace = p.trace();
    if (keep_full_covariance) out.full_covs[k] = p;
  };
  record(n - 1, mean_next, cov_next);

  for (std::size_t k = n - 1; k-- > 0;) {
    const FilterStep& cur = hist.steps[k];
    const FilterStep& next = hist.steps[k + 1];
    const auto res = rts_backward_step(cur.mean_filt, cur.cov_filt,
                                       next.transition, next.mean_pred,
                                       next.cov_pred, mean_next, cov_next);
    if (res.regularized) ++out.regularized_steps;
    mean_next = res.mean;
    cov_next = res.cov;
    record(k, mean_next, cov_next);
  }
  return out;
}

/// Pose with position covariance, the per-step output of one iteration.
struct PoseEstimate {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Quaternion orientation;
  Mat3 position_cov = Mat3::Zero();
};

struct IterationResult {
  int index = 0;
  std::string label;  // "EKF" for the first pass, then "GIEKF-i"
  std::vector<PoseEstimate> trajectory;
  Vec19 initial_mean;
  Vec19 smoothed_initial_mean;
  double max_position_change = std::numeric_limits<double>::quiet_NaN();
  double smoothed_trace_excess = 0.0;  // max over steps of smoothed - filtered trace
};

struct GiekfResult {
  std::vector<IterationResult> iterations;
  int converged_iteration = -1;  // first iteration meeting the tolerance
  bool diverged = false;
};

namespace detail {

inline double measurement_span(const std::vector<Measurement>& meas) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  bool any = false;
  for (const auto& m : meas) {
    Vec3 p = Vec3::Zero();
    if (m.kind == MeasurementKind::position3d) {
      p = m.value;
    } else if (m.kind == MeasurementKind::position2d) {
      p << m.value(0), m.value(1), 0.0;
    } else {
      continue;
    }
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
    any = true;
  }
  if (!any) return std::numeric_limits<double>::infinity();
  return (hi - lo).norm();
}

}  // namespace detail

/// Global iterated EKF: repeated forward-filter/backward-smoother passes.
/// Each iteration after the first reseeds the initial mean from the previous
/// smoothed solution while the initial covariance stays fixed.  Stops at
/// max_iterations, at convergence of the smoothed positions, or when the
/// divergence guard trips (any position beyond 10x the measurement span).
inline GiekfResult giekf_run(const std::vector<ImuSample>& imu,
                             const std::vector<Measurement>& meas,
                             const FusionConfig& config) {
  config.validate();
  GiekfResult out;

  const double span = detail::measurement_span(meas);
  const double guard =
      std::isfinite(span) ? 10.0 * std::max(span, 10.0)
                          : std::numeric_limits<double>::infinity();

  GaussianEstimate prior = config.prior;
  std::vector<PoseEstimate> prev_traj;

  for (int i = 0; i < config.max_iterations; ++i) {
    const FilterHistory hist = forward_pass(imu, meas, prior, config);
    const SmoothedHistory smooth = rts_smooth(hist);

    IterationResult it;
    it.index = i;
    it.label = i == 0 ? "EKF" : "GIEKF-" + std::to_string(i);
    it.initial_mean = prior.mean;
    it.smoothed_initial_mean = smooth.steps.front().mean;
    it.trajectory.reserve(smooth.steps.size());
    double max_pos = 0.0;
    double trace_excess = 0.0;
    for (std::size_t k = 0; k < smooth.steps.size(); ++k) {
      const SmoothedStep& s = smooth.steps[k];
      PoseEstimate pe;
      pe.t = s.t;
      pe.position = s.mean.segment<3>(kIdxPos);
      pe.orientation =
          Quaternion::from_coeffs(s.mean.segment<4>(kIdxQuat)).normalized();
      pe.position_cov = s.posvel_cov.topLeftCorner<3, 3>();
      max_pos = std::max(max_pos, pe.position.norm());
      trace_excess = std::max(
          trace_excess, s.cov_trace - hist.steps[k].cov_filt.trace());
      it.trajectory.push_back(pe);
    }
    it.smoothed_trace_excess = trace_excess;

    if (!prev_traj.empty()) {
      double change = 0.0;
      for (std::size_t k = 0; k < it.trajectory.size(); ++k) {
        change = std::max(change, (it.trajectory[k].position -
                                   prev_traj[k].position)
                                      .norm());
      }
      it.max_position_change = change;
    }

    if (max_pos > guard) {
      out.diverged = true;
      if (out.iterations.empty()) out.iterations.push_back(std::move(it));
      break;
    }

    prev_traj = it.trajectory;
    const double change = it.max_position_change;
    out.iterations.push_back(std::move(it));

    if (!std::isnan(change) && change < config.convergence_tol) {
      out.converged_iteration = i;
      break;
    }

    // Reseed the initial mean from the smoothed pass; P_0 stays unchanged.
    prior.mean = out.iterations.back().smoothed_initial_mean;
    prior.mean.segment<4>(kIdxQuat) =
        Quaternion::from_coeffs(prior.mean.segment<4>(kIdxQuat))
            .normalized()
            .coeffs();
    // A reseeded state violating the NavState invariants (scale outside its
    // sanity bound, degenerate quaternion) counts as divergence.
    try {
      prior.state().validate();
    } catch (const std::invalid_argument&) {
      out.diverged = true;
      break;
    }
  }
  return out;
}

namespace detail {

/// -log N(y | mean, cov) evaluated with an LDLT factorization.
inline double gaussian_nll(const Eigen::VectorXd& y,
                           const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov) {
  const Eigen::Index d = y.size();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("nlpd: predictive covariance not factorizable");
  }
  const Eigen::VectorXd r = y - mean;
  const double maha = r.dot(ldlt.solve(r));
  const double logdet = ldlt.vectorD().array().log().sum();
  return 0.5 * (d * std::log(2.0 * M_PI) + logdet + maha);
}

template <typename Steps>
std::size_t nearest_step(const Steps& steps, double t) {
  std::size_t lo = 0, hi = steps.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (steps[mid].t <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo + 1 < steps.size() &&
      std::abs(steps[lo + 1].t - t) < std::abs(steps[lo].t - t)) {
    ++lo;
  }
  return lo;
}

}  // namespace detail

/// Mean negative log predictive density of held-out measurements under the
/// filtered belief, each scored at the nearest-in-time step.
inline double nlpd_score(const FilterHistory& hist,
                         const std::vector<Measurement>& heldout,
                         const FusionConfig& config) {
  if (heldout.empty()) {
    throw std::invalid_argument("nlpd_score: empty held-out set");
  }
  double total = 0.0;
  for (const auto& m : heldout) {
    const std::size_t k = detail::nearest_step(hist.steps, m.t);
    GaussianEstimate est;
    est.mean = hist.steps[k].mean_filt;
    est.cov = hist.steps[k].cov_filt;
    const MeasurementModel model = measurement_model(m.kind, est, config);
    const Eigen::MatrixXd s =
        model.jacobian * est.cov * model.jacobian.transpose() + m.noise;
    total += detail::gaussian_nll(m.value, model.predicted, s);
  }
  return total / static_cast<double>(heldout.size());
}

/// Same score against a smoothed trajectory; position-type measurements only
/// (the smoothed record keeps the position covariance block).
inline double nlpd_score(const std::vector<PoseEstimate>& traj,
                         const std::vector<Measurement>& heldout) {
  if (heldout.empty()) {
    throw std::invalid_argument("nlpd_score: empty held-out set");
  }
  double total = 0.0;
  for (const auto& m : heldout) {
    const std::size_t k = detail::nearest_step(traj, m.t);
    const PoseEstimate& p = traj[k];
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    switch (m.kind) {
      case MeasurementKind::position3d:
        mean = p.position;
        cov = p.position_cov;
        break;
      case MeasurementKind::position2d:
        mean = p.position.head<2>();
        cov = p.position_cov.topLeftCorner<2, 2>();
        break;
      case MeasurementKind::height:
        mean = Eigen::VectorXd::Constant(1, p.position.z());
        cov = Eigen::MatrixXd::Constant(1, 1, p.position_cov(2, 2));
        break;
      default:
        throw std::invalid_argument(
            "nlpd_score: only position-type measurements can be scored "
            "against a smoothed trajectory");
    }
    total += detail::gaussian_nll(m.value, mean, cov + m.noise);
  }
  return total / static_cast<double>(heldout.size());
}

}  // namespace pathfuse
