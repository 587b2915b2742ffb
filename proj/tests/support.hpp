/*
 Copyright 2026 The sflow Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "sflow/sflow.hpp"

namespace sflow::testing {

inline std::filesystem::path source_dir() { return SFLOW_SOURCE_DIR; }

inline std::filesystem::path golden_config_path() {
  return source_dir() / "configs" / "michaelis_menten.cfg";
}

/// The seven Michaelis-Menten experiments.
inline Dataset table1() {
  return Dataset::from_scalar({0.3330, 0.1670, 0.0833, 0.0416, 0.0208, 0.0104, 0.0052},
                              {3.6360, 3.6360, 3.2360, 2.6660, 2.1140, 1.4660, 0.8661});
}

inline SplitSpec table1_split() { return SplitSpec{{0, 2, 4, 6}, {1, 3, 5}}; }

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline ControlSignal zero_control(const TimeGrid& grid, Eigen::Index p, double u_max = 10.0,
                                  ControlRepresentation rep = ControlRepresentation::Grid,
                                  int basis_size = 12) {
  return ControlSignal::constant(grid, Vector::Zero(p), u_max, rep, basis_size);
}

inline Matrix matrix_exponential(const Matrix& m) { return m.exp(); }

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// Central-difference slope of f at coefficients a along d.
template <class F>
double fd_slope(F&& f, const Matrix& a, const Matrix& d, double h) {
  return (f(Matrix(a + h * d)) - f(Matrix(a - h * d))) / (2.0 * h);
}

/// Bound on |<g, d>| per unit of max |g|: sum of w_j |d_j| for Grid
/// (trapezoid weights), sum of |d_k| for Basis.
inline double pairing_bound(const ControlSignal& like, const Matrix& d) {
  if (like.representation() == ControlRepresentation::Basis) return d.cwiseAbs().sum();
  double s = 0.0;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    s += like.grid().trapezoid_weight(static_cast<int>(j)) * d.col(j).cwiseAbs().sum();
  }
  return s;
}

/// The Michaelis-Menten problem with the pinned settings of
/// configs/michaelis_menten.cfg.
struct Section4 {
  double alpha = 0.01;
  double beta = 0.1;
  double z = 0.005;
  double mu = 1e5;
  double u_max = 0.5;
  double horizon = 1.5;
  int steps = 6000;
  LossScale scale = LossScale::One;
  Vector theta0 = vec({4.0, 0.1});

  SplitDatasets split() const { return apply_split(table1(), table1_split()); }
  Objective objective() const { return Objective(ModelSpec::michaelis_menten(), split().train, scale); }
  Objective validation() const { return Objective(ModelSpec::michaelis_menten(), split().validation, scale); }
  TimeGrid grid() const { return TimeGrid(horizon, steps); }
  ControlPartition partition() const { return ControlPartition::from_leader({true, false}); }

  SolverConfig config() const {
    SolverConfig c;
    c.alpha = alpha;
    c.beta = beta;
    c.z = z;
    c.mu = mu;
    c.u_max = u_max;
    c.horizon = horizon;
    c.steps = steps;
    return c;
  }

  FollowerProblem follower(ControlRepresentation rep = ControlRepresentation::Grid) const {
    return FollowerProblem{objective(), alpha,    beta,   partition(),
                           zero_control(grid(), 2, u_max, rep), grid(), theta0};
  }
  LeaderProblem leader(ControlRepresentation rep = ControlRepresentation::Grid) const {
    return LeaderProblem{objective(), validation(), z,      mu, partition(),
                         zero_control(grid(), 2, u_max, rep), grid(), theta0, TerminalMode::Penalty};
  }
};

/// Scalar linear-quadratic follower problem with a closed-form solution.
/// Dynamics theta' = -k theta + u, cost int alpha/2 theta^2 + beta/2 u^2.
/// Realized as a Linear model on one sample x = sqrt(k), y = 0, Half loss.
struct LqOracle {
  double k = 1.0;
  double alpha = 1.0;
  double beta = 0.1;
  double horizon = 1.0;
  double theta0 = 1.0;

  double s() const { return std::sqrt(k * k + alpha / beta); }
  double D(double tau) const { return s() * std::cosh(s() * tau) + k * std::sinh(s() * tau); }
  /// Riccati solution in time-to-go.
  double P(double tau) const { return alpha * std::sinh(s() * tau) / D(tau); }
  double theta(double t) const { return theta0 * D(horizon - t) / D(horizon); }
  double control(double t) const { return -P(horizon - t) * theta(t) / beta; }
  double optimal_cost() const { return 0.5 * P(horizon) * theta0 * theta0; }

  Objective objective() const {
    return Objective(ModelSpec::linear(1), Dataset::from_scalar({std::sqrt(k)}, {0.0}), LossScale::Half);
  }

  FollowerProblem problem(int steps, double u_max = 10.0) const {
    const TimeGrid grid(horizon, steps);
    return FollowerProblem{objective(),
                           alpha,
                           beta,
                           ControlPartition::from_leader({false}),
                           zero_control(grid, 1, u_max),
                           grid,
                           vec({theta0})};
  }
};

}  // namespace sflow::testing
