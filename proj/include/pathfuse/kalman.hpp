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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

namespace pathfuse {

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.transpose())).eval();
}

/// Result of one measurement update on a Gaussian belief.
template <typename MeanVec, typename CovMat, typename InnoMat>
struct KalmanUpdateResult {
  MeanVec mean;
  CovMat cov;
  InnoMat innovation_cov;
};

/// Joseph-form Kalman update.  The innovation is supplied by the caller so a
/// nonlinear measurement prediction can be used with the linearized H.
/// Throws if the innovation covariance is not invertible.
template <typename MeanVec, typename CovMat, typename InnoVec,
          typename MeasMat, typename MeasCov>
auto kalman_update(const MeanVec& mean, const CovMat& cov,
                   const InnoVec& innovation, const MeasMat& h,
                   const MeasCov& r) {
  using InnoCov = decltype((h * cov * h.transpose() + r).eval());
  const InnoCov s = h * cov * h.transpose() + r;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(s));
  if (!lu.isInvertible()) {
    throw std::runtime_error("kalman_update: singular innovation covariance");
  }
  const auto gain = (cov * h.transpose() * lu.inverse()).eval();

  KalmanUpdateResult<MeanVec, CovMat, InnoCov> out;
  out.mean = mean + gain * innovation;
  const auto i_kh =
      (CovMat::Identity(cov.rows(), cov.cols()) - gain * h).eval();
  out.cov = symmetrized(i_kh * cov * i_kh.transpose() +
                        gain * r * gain.transpose());
  out.innovation_cov = s;
  return out;
}

/// One backward Rauch-Tung-Striebel step.  Inputs are the filtered moments at
/// step k, the transition Jacobian from k to k+1, the predicted moments at
/// k+1, and the smoothed moments at k+1.  A singular predicted covariance is
/// regularized with eps * I; `regularized` reports whether that happened.
template <typename MeanVec, typename CovMat, typename TransMat>
struct RtsStepResult {
  MeanVec mean;
  CovMat cov;
  bool regularized = false;
};

template <typename MeanVec, typename CovMat, typename TransMat>
auto rts_backward_step(const MeanVec& mean_filt, const CovMat& cov_filt,
                       const TransMat& f, const MeanVec& mean_pred_next,
                       const CovMat& cov_pred_next,
                       const MeanVec& mean_smooth_next,
                       const CovMat& cov_smooth_next, double eps = 1e-12) {
  RtsStepResult<MeanVec, CovMat, TransMat> out;
  CovMat pred = cov_pred_next;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Eigen::MatrixXd(pred));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    pred += eps * CovMat::Identity(pred.rows(), pred.cols());
    ldlt.compute(Eigen::MatrixXd(pred));
    out.regularized = true;
  }
  // G = P_f F^T P_pred^{-1}, computed as a solve against the transposed pair.
  const Eigen::MatrixXd gain_t = ldlt.solve(Eigen::MatrixXd(f * cov_filt));
  const auto gain = gain_t.transpose().eval();

  out.mean = mean_filt + gain * (mean_smooth_next - mean_pred_next);
  out.cov = symmetrized(cov_filt + gain * (cov_smooth_next - cov_pred_next) *
                                       gain.transpose());
  return out;
}

}  // namespace pathfuse
