#pragma once

#include <Eigen/Core>

#include "roadwatch/types.hpp"

namespace roadwatch {

using StateVector = Eigen::Matrix<double, 4, 1>;  // (x, y, vx, vy)
using StateCovariance = Eigen::Matrix<double, 4, 4>;

// Constant-velocity filter state in image space: pixels and pixels/second.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();

  Point2 position() const noexcept { return {mean(0), mean(1)}; }
  Point2 velocity() const noexcept { return {mean(2), mean(3)}; }
};

/// Constant-velocity transition matrix for a step of `dt` seconds.
StateCovariance transition_matrix(double dt);

/// Discrete white-acceleration process noise, per axis
/// q * [[dt^4/4, dt^3/2], [dt^3/2, dt^2]].
StateCovariance process_noise(double dt, double q);

// Throws ContractViolation when dt <= 0 (or non-finite) or q < 0.
KalmanState predict(const KalmanState& state, double dt, double q);

// Position-only measurement with isotropic noise `r` (pixels^2 per axis).
// Throws ValidationError on a non-finite observation, ContractViolation on r <= 0.
KalmanState update(const KalmanState& state, Point2 observation, double r);

// Innovation and its covariance for `observation` against `state`; used for
// consistency checks (normalised innovation squared).
double normalized_innovation_squared(const KalmanState& state, Point2 observation, double r);

// Symmetry error (max |P - P^T| relative to max |P|) and smallest eigenvalue.
double symmetry_error(const StateCovariance& p);
double min_eigenvalue(const StateCovariance& p);

}  // namespace roadwatch
