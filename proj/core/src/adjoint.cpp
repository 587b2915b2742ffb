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

#include "sflow/adjoint.hpp"

#include <cmath>
#include <stdexcept>

namespace sflow {

namespace {

void check_common(const Objective& objective, const ControlPartition& part,
                  const ControlSignal& control, const TimeGrid& grid, const Vector& theta0) {
  const auto p = objective.dim();
  if (part.dim() != p || control.dim() != p || theta0.size() != p) {
    throw std::invalid_argument("problem: dimension mismatch between model, partition, "
                                "controls and theta0");
  }
  if (!(control.grid() == grid)) {
    throw std::invalid_argument("problem: control lives on a different time grid");
  }
  if (!theta0.allFinite()) throw std::invalid_argument("problem: theta0 must be finite");
}

// Combined control u1*chi1 + u2*chi2 sampled at every RK4 stage time
// (nodes and midpoints). Column k holds time k * dt / 2.
Matrix sample_half_nodes(const ControlSignal& u1, const ControlSignal& u2,
                         const ControlPartition& part) {
  const TimeGrid& grid = u1.grid();
  const int n = grid.steps();
  Matrix out(part.dim(), 2 * n + 1);
  const Matrix a = u1.sample_nodes();
  const Matrix b = u2.sample_nodes();
  for (int j = 0; j <= n; ++j) {
    out.col(2 * j) = a.col(j).cwiseProduct(part.leader_mask()) +
                     b.col(j).cwiseProduct(part.follower_mask());
  }
  for (int j = 0; j < n; ++j) {
    const double t = grid.node(j) + 0.5 * grid.dt();
    out.col(2 * j + 1) = combine_controls(u1, u2, part, t);
  }
  return out;
}

}  // namespace

void FollowerProblem::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("follower problem: alpha and beta must be positive");
  }
  check_common(objective, partition, leader_control, grid, theta0);
}

void LeaderProblem::validate() const {
  if (!(mu >= 0.0)) throw std::invalid_argument("leader problem: mu must be >= 0");
  if (!(z >= 0.0)) throw std::invalid_argument("leader problem: z must be >= 0");
  if (validation.dim() != objective.dim()) {
    throw std::invalid_argument("leader problem: validation model dimension mismatch");
  }
  check_common(objective, partition, follower_control, grid, theta0);
}

double hamiltonian_follower(const Objective& objective, const Vector& theta, const Vector& p2,
                            const Vector& u1, const Vector& u2, const ControlPartition& part,
                            double alpha, double beta) {
  const Vector u2_own = u2.cwiseProduct(part.follower_mask());
  const Vector drift = -objective.gradient(theta) + u1.cwiseProduct(part.leader_mask()) + u2_own;
  return drift.dot(p2) + 0.5 * alpha * theta.squaredNorm() + 0.5 * beta * u2_own.squaredNorm();
}

double hamiltonian_leader(const Objective& objective, const Vector& theta, const Vector& p1,
                          const Vector& u1, const Vector& u2, const ControlPartition& part,
                          double state_weight) {
  const Vector drift = -objective.gradient(theta) + u1.cwiseProduct(part.leader_mask()) +
                       u2.cwiseProduct(part.follower_mask());
  return drift.dot(p1) + 0.5 * state_weight * theta.squaredNorm();
}

Vector costate_field_follower(const Objective& objective, const Vector& theta, const Vector& p2,
                              double alpha) {
  return objective.hvp(theta, p2) - alpha * theta;
}

Vector costate_field_leader(const Objective& objective, const Vector& theta, const Vector& p1,
                            double state_weight) {
  return objective.hvp(theta, p1) - state_weight * theta;
}

Vector leader_terminal_costate(const LeaderProblem& prob, const Vector& theta_T) {
  const Vector grad_phi = prob.validation.gradient(theta_T);
  if (prob.terminal_mode == TerminalMode::PaperFixed) return -grad_phi;
  const double residual = prob.validation.value(theta_T) - prob.z;
  return (prob.mu * residual) * grad_phi;
}

Trajectory forward_sweep(const Objective& objective, const Vector& theta0,
                         const ControlSignal& u1, const ControlSignal& u2,
                         const ControlPartition& part) {
  if (u1.dim() != part.dim() || u2.dim() != part.dim()) {
    throw std::invalid_argument("forward_sweep: dimension mismatch");
  }
  if (!(u1.grid() == u2.grid())) {
    throw std::invalid_argument("forward_sweep: controls live on different grids");
  }
  const TimeGrid& grid = u1.grid();
  const Matrix table = sample_half_nodes(u1, u2, part);
  const double half = 0.5 * grid.dt();
  VectorField field = [&](double t, const Vector& theta) -> Vector {
    const double k = std::round(t / half);
    if (std::abs(t - k * half) <= 1e-9 * half && k >= 0 && k < table.cols()) {
      return -objective.gradient(theta) + table.col(static_cast<Eigen::Index>(k));
    }
    return -objective.gradient(theta) + combine_controls(u1, u2, part, t);
  };
  return integrate_forward(field, theta0, grid);
}

double state_cost(const Trajectory& traj) {
  const Matrix mid = hermite_midpoints(traj.states, traj.rates, traj.grid);
  const double dt = traj.grid.dt();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < mid.cols(); ++j) {
    sum += traj.states.col(j).squaredNorm() + 4.0 * mid.col(j).squaredNorm() +
           traj.states.col(j + 1).squaredNorm();
  }
  return sum * dt / 12.0;
}

double follower_cost(const FollowerProblem& prob, const Trajectory& traj, const ControlSignal& u2) {
  const TimeGrid& grid = traj.grid;
  const Matrix u = u2.sample_nodes();
  const Vector& mask = prob.partition.follower_mask();
  double control = 0.0;
  for (int j = 0; j < grid.steps(); ++j) {
    const Vector um = u2.eval(grid.node(j) + 0.5 * grid.dt());
    control += u.col(j).cwiseProduct(mask).squaredNorm() +
               4.0 * um.cwiseProduct(mask).squaredNorm() +
               u.col(j + 1).cwiseProduct(mask).squaredNorm();
  }
  return prob.alpha * state_cost(traj) + prob.beta * control * grid.dt() / 12.0;
}

LeaderCost leader_cost(const LeaderProblem& prob, const Trajectory& traj) {
  LeaderCost c;
  c.J1 = state_cost(traj);
  c.phi = prob.validation.value(traj.final_state());
  const double terminal = prob.terminal_mode == TerminalMode::Penalty
                              ? 0.5 * prob.mu * (c.phi - prob.z) * (c.phi - prob.z)
                              : -c.phi;
  c.merit = prob.state_weight * c.J1 + terminal;
  return c;
}

ControlGradient project_gradient(Matrix nodal, const Matrix& midpoint, const ControlSignal& like) {
  const TimeGrid& grid = like.grid();
  const int n = grid.steps();
  if (nodal.rows() != like.dim() || nodal.cols() != n + 1 || midpoint.rows() != like.dim() ||
      midpoint.cols() != n) {
    throw std::invalid_argument("project_gradient: gradient samples have wrong shape");
  }
  const double dt = grid.dt();
  Matrix coeffs;
  if (like.representation() == ControlRepresentation::Grid) {
    // Simpson on each interval against the hat functions; the hat is 1/2
    // at the midpoints on either side of its node.
    coeffs = Matrix::Zero(like.dim(), n + 1);
    for (int j = 0; j < n; ++j) {
      coeffs.col(j) += (dt / 6.0) * (nodal.col(j) + 2.0 * midpoint.col(j));
      coeffs.col(j + 1) += (dt / 6.0) * (nodal.col(j + 1) + 2.0 * midpoint.col(j));
    }
    for (int j = 0; j <= n; ++j) coeffs.col(j) /= grid.trapezoid_weight(j);
  } else {
    const int nb = like.basis_size();
    const double T = grid.horizon();
    coeffs = Matrix::Zero(like.dim(), nb);
    for (int j = 0; j < n; ++j) {
      const double t0 = grid.node(j);
      const double tm = t0 + 0.5 * dt;
      const double t1 = grid.node(j + 1);
      for (int k = 0; k < nb; ++k) {
        coeffs.col(k) += (dt / 6.0) * (legendre_basis(k, t0, T) * nodal.col(j) +
                                       4.0 * legendre_basis(k, tm, T) * midpoint.col(j) +
                                       legendre_basis(k, t1, T) * nodal.col(j + 1));
      }
    }
  }
  return {std::move(nodal), std::move(coeffs), like.representation()};
}

double gradient_pairing(const ControlGradient& g, const Matrix& direction,
                        const ControlSignal& like) {
  if (direction.rows() != g.coefficients.rows() || direction.cols() != g.coefficients.cols()) {
    throw std::invalid_argument("gradient_pairing: shape mismatch");
  }
  if (like.representation() == ControlRepresentation::Basis) {
    return g.coefficients.cwiseProduct(direction).sum();
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < direction.cols(); ++j) {
    sum += like.grid().trapezoid_weight(static_cast<int>(j)) * g.coefficients.col(j).dot(direction.col(j));
  }
  return sum;
}

FollowerSweep follower_sweep(const FollowerProblem& prob, const ControlSignal& u2) {
  prob.validate();
  return follower_sweep(
      prob, u2,
      forward_sweep(prob.objective, prob.theta0, prob.leader_control, u2, prob.partition));
}

FollowerSweep follower_sweep(const FollowerProblem& prob, const ControlSignal& u2,
                             Trajectory traj) {
  if (u2.dim() != prob.objective.dim()) {
    throw std::invalid_argument("follower_sweep: control dimension mismatch");
  }
  const double J2 = follower_cost(prob, traj, u2);

  const Objective& obj = prob.objective;
  const double alpha = prob.alpha;
  VectorField field = [&](double t, const Vector& p) -> Vector {
    return costate_field_follower(obj, interpolate_state(traj, t), p, alpha);
  };
  CostateTrajectory costate = integrate_backward(field, Vector::Zero(obj.dim()), prob.grid,
                                                 TerminalKind::FollowerZero);

  const Vector& mask = prob.partition.follower_mask();
  const TimeGrid& grid = prob.grid;
  Matrix nodal = prob.beta * u2.sample_nodes() + costate.costates;
  Matrix mid = hermite_midpoints(costate.costates, costate.rates, grid);
  for (Eigen::Index j = 0; j < mid.cols(); ++j) {
    mid.col(j) = (mid.col(j) + prob.beta * u2.eval(grid.node(static_cast<int>(j)) + 0.5 * grid.dt()))
                     .cwiseProduct(mask);
  }
  for (Eigen::Index j = 0; j < nodal.cols(); ++j) nodal.col(j) = nodal.col(j).cwiseProduct(mask);
  ControlGradient g = project_gradient(std::move(nodal), mid, u2);
  return {std::move(traj), std::move(costate), J2, std::move(g)};
}

ControlGradient control_gradient_follower(const FollowerProblem& prob, const ControlSignal& u2) {
  return follower_sweep(prob, u2).gradient;
}

LeaderSweep leader_sweep(const LeaderProblem& prob, const ControlSignal& u1, Trajectory forward) {
  prob.validate();
  if (u1.dim() != prob.objective.dim()) {
    throw std::invalid_argument("leader_sweep: control dimension mismatch");
  }
  const LeaderCost cost = leader_cost(prob, forward);
  const Objective& obj = prob.objective;
  const double w = prob.state_weight;
  VectorField field = [&](double t, const Vector& p) -> Vector {
    return costate_field_leader(obj, interpolate_state(forward, t), p, w);
  };
  CostateTrajectory costate =
      integrate_backward(field, leader_terminal_costate(prob, forward.final_state()), prob.grid,
                         TerminalKind::LeaderTerminal);

  const Vector& mask = prob.partition.leader_mask();
  Matrix nodal = costate.costates;
  Matrix mid = hermite_midpoints(costate.costates, costate.rates, prob.grid);
  for (Eigen::Index j = 0; j < nodal.cols(); ++j) nodal.col(j) = nodal.col(j).cwiseProduct(mask);
  for (Eigen::Index j = 0; j < mid.cols(); ++j) mid.col(j) = mid.col(j).cwiseProduct(mask);
  ControlGradient g = project_gradient(std::move(nodal), mid, u1);
  return {std::move(forward), std::move(costate), cost, std::move(g)};
}

LeaderSweep leader_sweep(const LeaderProblem& prob, const ControlSignal& u1) {
  Trajectory forward =
      forward_sweep(prob.objective, prob.theta0, u1, prob.follower_control, prob.partition);
  return leader_sweep(prob, u1, std::move(forward));
}

ControlGradient control_gradient_leader(const LeaderProblem& prob, const ControlSignal& u1) {
  return leader_sweep(prob, u1).gradient;
}

}  // namespace sflow
