#pragma once

#include <Eigen/Dense>

#include "confmot/domain.hpp"

namespace confmot {

/// Pose attributes that neither filter estimates; they are copied from the
/// latest matched detection.
struct PassThrough {
  double z = 0.0;
  Extent extent;
  double yaw = 0.0;
};

inline PassThrough pass_through_of(const Detection& d) { return {d.cz, d.extent, d.yaw}; }

// ---------------------------------------------------------------------------
// Constant-velocity point tracker
// ---------------------------------------------------------------------------

struct PointTrackerState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();      // predicted ground-plane center
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();      // m / frame
  Eigen::Vector2d last_matched = Eigen::Vector2d::Zero();  // center of the latest matched detection
  PassThrough pose;
};

inline PointTrackerState pt_init(const Detection& d) {
  PointTrackerState s;
  s.position = {d.cx, d.cy};
  s.last_matched = s.position;
  s.pose = pass_through_of(d);
  return s;
}

inline PointTrackerState pt_predict(PointTrackerState s, double dt) {
  s.position += s.velocity * dt;
  return s;
}

/// `dt` is the number of frames since the previous matched detection.
inline PointTrackerState pt_update(PointTrackerState s, const Detection& d, double dt) {
  const Eigen::Vector2d z(d.cx, d.cy);
  s.velocity = (z - s.last_matched) / dt;
  s.position = z;
  s.last_matched = z;
  s.pose = pass_through_of(d);
  return s;
}

// ---------------------------------------------------------------------------
// Constant-acceleration Kalman filter, state (x, y, vx, vy, ax, ay)
// ---------------------------------------------------------------------------

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix26d = Eigen::Matrix<double, 2, 6>;

struct KalmanState {
  Vector6d mean = Vector6d::Zero();
  Matrix6d covariance = Matrix6d::Identity();
  PassThrough pose;
};

/// Constant-acceleration transition for a step of `dt` frames.
inline Matrix6d cvca_transition(double dt) {
  Matrix6d f = Matrix6d::Identity();
  const double half_dt2 = 0.5 * dt * dt;
  for (int axis = 0; axis < 2; ++axis) {
    f(axis, 2 + axis) = dt;
    f(axis, 4 + axis) = half_dt2;
    f(2 + axis, 4 + axis) = dt;
  }
  return f;
}

/// Discrete white-jerk process noise: G sigma^2 G^T per axis with
/// G = (dt^3/6, dt^2/2, dt).
inline Matrix6d white_jerk_noise(double dt, double jerk_sigma) {
  const double g[3] = {dt * dt * dt / 6.0, dt * dt / 2.0, dt};
  const double var = jerk_sigma * jerk_sigma;
  Matrix6d q = Matrix6d::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) q(2 * a + axis, 2 * b + axis) = g[a] * g[b] * var;
    }
  }
  return q;
}

inline Matrix26d position_selector() {
  Matrix26d h = Matrix26d::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

inline Eigen::Matrix2d measurement_noise(const KalmanNoise& noise) {
  return Eigen::Vector2d(noise.meas_var_x, noise.meas_var_y).asDiagonal();
}

inline KalmanState kf_init(const Detection& d, const KalmanNoise& noise) {
  KalmanState s;
  s.mean << d.cx, d.cy, 0.0, 0.0, 0.0, 0.0;
  Vector6d diag;
  diag << noise.init_pos_var, noise.init_pos_var, noise.init_vel_var, noise.init_vel_var, noise.init_acc_var,
      noise.init_acc_var;
  s.covariance = diag.asDiagonal();
  s.pose = pass_through_of(d);
  return s;
}

inline KalmanState kf_predict(KalmanState s, double dt, const Matrix6d& process_noise) {
  const Matrix6d f = cvca_transition(dt);
  s.mean = f * s.mean;
  Matrix6d p = f * s.covariance * f.transpose() + process_noise;
  s.covariance = 0.5 * (p + p.transpose());
  return s;
}

inline KalmanState kf_predict(KalmanState s, double dt, const KalmanNoise& noise) {
  return kf_predict(std::move(s), dt, white_jerk_noise(dt, noise.jerk_sigma));
}

/// S = H P H^T + R.
inline Eigen::Matrix2d innovation_covariance(const KalmanState& s, const Eigen::Matrix2d& meas_noise) {
  const Matrix26d h = position_selector();
  Eigen::Matrix2d cov = h * s.covariance * h.transpose() + meas_noise;
  return 0.5 * (cov + cov.transpose());
}

inline Eigen::Vector2d predicted_measurement(const KalmanState& s) { return s.mean.head<2>(); }

/// Measurement update with the Joseph-form covariance.
inline KalmanState kf_update(KalmanState s, const Detection& d, const Eigen::Matrix2d& meas_noise) {
  const Matrix26d h = position_selector();
  const Eigen::Matrix2d innov_cov = innovation_covariance(s, meas_noise);
  Eigen::LDLT<Eigen::Matrix2d> ldlt(innov_cov);
  const double det = innov_cov.determinant();
  if (ldlt.info() != Eigen::Success || !(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorKind::SingularCovariance, "innovation covariance is singular");
  }
  // K = P H^T S^-1
  const Eigen::Matrix<double, 6, 2> pht = s.covariance * h.transpose();
  const Eigen::Matrix<double, 6, 2> gain = ldlt.solve(pht.transpose()).transpose();
  const Eigen::Vector2d residual = Eigen::Vector2d(d.cx, d.cy) - h * s.mean;
  s.mean += gain * residual;
  const Matrix6d i_kh = Matrix6d::Identity() - gain * h;
  Matrix6d p = i_kh * s.covariance * i_kh.transpose() + gain * meas_noise * gain.transpose();
  s.covariance = 0.5 * (p + p.transpose());
  s.pose = pass_through_of(d);
  return s;
}

inline KalmanState kf_update(KalmanState s, const Detection& d, const KalmanNoise& noise) {
  return kf_update(std::move(s), d, measurement_noise(noise));
}

}  // namespace confmot
