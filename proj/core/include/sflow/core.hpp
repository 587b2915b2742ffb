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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Data

/// Labeled samples (x_i, y_i). Inputs are vectors, outputs scalars.
class Dataset {
 public:
  Dataset() = default;

  /// Throws std::invalid_argument on length mismatch, empty input, ragged
  /// input dimensions or non-finite values.
  Dataset(std::vector<Vector> inputs, std::vector<double> outputs);

  /// Convenience constructor for scalar inputs.
  static Dataset from_scalar(const std::vector<double>& inputs,
                             const std::vector<double>& outputs);

  std::size_t size() const { return outputs_.size(); }
  Eigen::Index input_dim() const { return inputs_.empty() ? 0 : inputs_.front().size(); }
  const Vector& input(std::size_t i) const { return inputs_[i]; }
  double output(std::size_t i) const { return outputs_[i]; }
  const std::vector<Vector>& inputs() const { return inputs_; }
  const std::vector<double>& outputs() const { return outputs_; }

  /// Samples at the given zero-based indices, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<Vector> inputs_;
  std::vector<double> outputs_;
};

/// Disjoint train/validation index sets into a source dataset (zero-based).
struct SplitSpec {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;

  /// Throws std::invalid_argument if the sets overlap, repeat an index,
  /// are empty, or reach past `source_size`.
  void validate(std::size_t source_size) const;
};

struct SplitDatasets {
  Dataset train;
  Dataset validation;
};

SplitDatasets apply_split(const Dataset& source, const SplitSpec& split);

// ---------------------------------------------------------------------------
// Time discretization

/// Uniform grid t_j = j * T / N on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  int num_nodes() const { return steps_ + 1; }
  double dt() const { return dt_; }

  /// Node j; the last node is exactly the horizon.
  double node(int j) const { return j == steps_ ? horizon_ : j * dt_; }

  /// Composite trapezoid weight of node j.
  double trapezoid_weight(int j) const {
    return (j == 0 || j == steps_) ? 0.5 * dt_ : dt_;
  }

  bool operator==(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && steps_ == other.steps_;
  }

 private:
  double horizon_;
  int steps_;
  double dt_;
};

/// Throws std::invalid_argument unless T > 0 and N >= 2.
TimeGrid make_time_grid(double horizon, int steps);

// ---------------------------------------------------------------------------
// Controls

enum class ControlRepresentation { Grid, Basis };

/// Shifted Legendre polynomial P_k(2t/T - 1), k zero-based.
double legendre_basis(int k, double t, double horizon);

/// A control u : [0, T] -> R^p, either as nodal values on a TimeGrid
/// (piecewise-linear in between) or as coefficients of a shifted Legendre
/// basis. Every evaluation is clamped componentwise to [-u_max, u_max].
///
/// The coefficient matrix is p x (N_t + 1) for Grid and p x N for Basis.
class ControlSignal {
 public:
  static ControlSignal on_grid(const TimeGrid& grid, Matrix node_values, double u_max);
  static ControlSignal on_basis(const TimeGrid& grid, Matrix coefficients, double u_max);

  /// Constant control `value`. For Basis only the first (constant)
  /// coefficient column is nonzero.
  static ControlSignal constant(const TimeGrid& grid, const Vector& value, double u_max,
                                ControlRepresentation rep = ControlRepresentation::Grid,
                                int basis_size = 12);

  ControlRepresentation representation() const { return rep_; }
  Eigen::Index dim() const { return coeffs_.rows(); }
  const TimeGrid& grid() const { return grid_; }
  double u_max() const { return u_max_; }
  const Matrix& coefficients() const { return coeffs_; }
  int basis_size() const {
    return rep_ == ControlRepresentation::Basis ? static_cast<int>(coeffs_.cols()) : 0;
  }

  /// Throws std::out_of_range for t outside [0, T].
  Vector eval(double t) const;

  /// eval() at every grid node, p x (N_t + 1).
  Matrix sample_nodes() const;

  /// Same representation and grid, new coefficients. Grid values are
  /// clamped to the amplitude bound.
  ControlSignal with_coefficients(Matrix coeffs) const;

 private:
  ControlSignal(TimeGrid grid, ControlRepresentation rep, Matrix coeffs, double u_max);

  TimeGrid grid_;
  ControlRepresentation rep_;
  Matrix coeffs_;
  double u_max_;
};

Vector eval_control(const ControlSignal& u, double t);

/// Complementary coordinate masks splitting R^p between the leader and the
/// follower.
class ControlPartition {
 public:
  /// Throws std::invalid_argument unless the masks are binary, equally
  /// sized, disjoint and jointly cover every coordinate.
  ControlPartition(Vector leader_mask, Vector follower_mask);

  /// Leader owns the coordinates flagged in `leader`; follower the rest.
  static ControlPartition from_leader(const std::vector<bool>& leader);

  Eigen::Index dim() const { return leader_.size(); }
  const Vector& leader_mask() const { return leader_; }
  const Vector& follower_mask() const { return follower_; }

 private:
  Vector leader_;
  Vector follower_;
};

/// u1(t) * leader_mask + u2(t) * follower_mask.
Vector combine_controls(const ControlSignal& u1, const ControlSignal& u2,
                        const ControlPartition& part, double t);

// ---------------------------------------------------------------------------
// Trajectories

/// States at every grid node together with the vector field evaluated there
/// (the derivative samples feed Hermite interpolation).
struct Trajectory {
  TimeGrid grid{1.0, 2};
  Matrix states;  // p x (N_t + 1)
  Matrix rates;   // p x (N_t + 1)

  Vector state(int j) const { return states.col(j); }
  Vector final_state() const { return states.col(states.cols() - 1); }
};

enum class TerminalKind { FollowerZero, LeaderTerminal };

struct CostateTrajectory {
  TimeGrid grid{1.0, 2};
  Matrix costates;  // p x (N_t + 1)
  TerminalKind terminal_kind = TerminalKind::FollowerZero;
  Matrix rates;     // dp/dt at each node, p x (N_t + 1)

  Vector costate(int j) const { return costates.col(j); }
};

// ---------------------------------------------------------------------------
// Configuration and reporting

enum class TerminalMode { Penalty, PaperFixed };

struct SolverConfig {
  double alpha = 0.01;
  double beta = 0.1;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double eps_tol = 1e-5;
  double inner_tol = 1e-6;
  double z = 0.005;
  double mu = 50.0;
  int max_outer = 2000;
  int max_inner = 500;
  double u_max = 10.0;
  TerminalMode terminal_mode = TerminalMode::Penalty;
  double horizon = 1.5;
  int steps = 3000;

  /// Throws std::invalid_argument naming the first violated constraint.
  /// A zero step size is accepted and freezes the corresponding control.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double leader_grad_norm = 0.0;
  double follower_grad_norm = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
  double phi = 0.0;
  double leader_merit = 0.0;
  int inner_iterations = 0;
  double leader_step = 0.0;  // accepted gamma1 after backtracking; 0 if none
};

struct RunReport {
  Vector theta_final;
  double J1_value = 0.0;
  double J2_value = 0.0;
  double phi_value = 0.0;
  double leader_merit = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double leader_residual = 0.0;    // max-norm of the leader extremum residual
  double follower_residual = 0.0;  // max-norm of the follower extremum residual
  // Same residuals sampled pointwise at the nodes; these carry an O(dt^2)
  // discretization floor and are reported, not tested against tolerances.
  double leader_pointwise_residual = 0.0;
  double follower_pointwise_residual = 0.0;
  std::vector<IterationRecord> history;
  std::optional<ControlSignal> leader_control;
  std::optional<ControlSignal> follower_control;
  Trajectory trajectory;
};

}  // namespace sflow
