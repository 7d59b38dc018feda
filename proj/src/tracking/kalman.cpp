#include "roadwatch/kalman.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "roadwatch/errors.hpp"

namespace roadwatch {
namespace {

using MeasurementMatrix = Eigen::Matrix<double, 2, 4>;

MeasurementMatrix measurement_matrix() {
  MeasurementMatrix h = MeasurementMatrix::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

StateCovariance symmetrized(const StateCovariance& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

StateCovariance transition_matrix(double dt) {
  StateCovariance f = StateCovariance::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

StateCovariance process_noise(double dt, double q) {
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  const double dt4 = dt3 * dt;
  StateCovariance noise = StateCovariance::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    noise(axis, axis) = q * dt4 / 4.0;
    noise(axis, axis + 2) = q * dt3 / 2.0;
    noise(axis + 2, axis) = q * dt3 / 2.0;
    noise(axis + 2, axis + 2) = q * dt2;
  }
  return noise;
}

KalmanState predict(const KalmanState& state, double dt, double q) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ContractViolation("predict: dt must be positive and finite, got " + std::to_string(dt));
  }
  if (!(q >= 0.0)) throw ContractViolation("predict: process noise scale must be >= 0");

  const StateCovariance f = transition_matrix(dt);
  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = symmetrized(f * state.covariance * f.transpose() + process_noise(dt, q));
  return out;
}

KalmanState update(const KalmanState& state, Point2 observation, double r) {
  if (!std::isfinite(observation.x) || !std::isfinite(observation.y)) {
    throw ValidationError("update: observation must be finite");
  }
  if (!(r > 0.0)) throw ContractViolation("update: measurement noise must be positive");

  const MeasurementMatrix h = measurement_matrix();
  const Eigen::Vector2d z(observation.x, observation.y);
  const Eigen::Vector2d innovation = z - h * state.mean;
  const Eigen::Matrix2d s = h * state.covariance * h.transpose() + r * Eigen::Matrix2d::Identity();
  const Eigen::Matrix<double, 4, 2> gain = state.covariance * h.transpose() * s.inverse();

  // Joseph form keeps the posterior symmetric PSD under rounding.
  const StateCovariance i_kh = StateCovariance::Identity() - gain * h;
  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance = symmetrized(i_kh * state.covariance * i_kh.transpose() +
                               r * gain * gain.transpose());
  return out;
}

double normalized_innovation_squared(const KalmanState& state, Point2 observation, double r) {
  const MeasurementMatrix h = measurement_matrix();
  const Eigen::Vector2d innovation = Eigen::Vector2d(observation.x, observation.y) - h * state.mean;
  const Eigen::Matrix2d s = h * state.covariance * h.transpose() + r * Eigen::Matrix2d::Identity();
  return innovation.dot(s.inverse() * innovation);
}

double symmetry_error(const StateCovariance& p) {
  const double scale = p.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (p - p.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_eigenvalue(const StateCovariance& p) {
  Eigen::SelfAdjointEigenSolver<StateCovariance> solver(p, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace roadwatch
