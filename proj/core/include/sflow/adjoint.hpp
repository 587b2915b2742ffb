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

#include "sflow/core.hpp"
#include "sflow/integrate.hpp"
#include "sflow/models.hpp"

namespace sflow {

/// The follower's problem for a fixed leader control:
/// minimize J2[u2] = int (alpha/2 |theta|^2 + beta/2 |u2 * chi2|^2) dt subject
/// to theta' = -grad J0(theta) + u1 * chi1 + u2 * chi2, theta(0) = theta0.
struct FollowerProblem {
  Objective objective;
  double alpha = 0.01;
  double beta = 0.1;
  ControlPartition partition;
  ControlSignal leader_control;
  TimeGrid grid;
  Vector theta0;

  void validate() const;
};

/// The leader's problem with the follower response frozen:
/// minimize w * int 1/2 |theta|^2 dt + terminal term, where the terminal term
/// is (mu/2)(Phi(theta(T)) - z)^2 in Penalty mode and -Phi(theta(T)) in
/// PaperFixed mode (the functional whose adjoint has p1(T) = -dPhi/dtheta).
struct LeaderProblem {
  Objective objective;
  Objective validation;
  double z = 0.005;
  double mu = 50.0;
  ControlPartition partition;
  ControlSignal follower_control;
  TimeGrid grid;
  Vector theta0;
  TerminalMode terminal_mode = TerminalMode::Penalty;
  /// Weight w on the running state cost. Always 1 in the algorithm; tests
  /// set it to 0 to isolate the terminal term.
  double state_weight = 1.0;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Pointwise quantities

/// H2 = <-grad J0(theta) + u1*chi1 + u2*chi2, p2> + alpha/2 |theta|^2 + beta/2 |u2*chi2|^2
double hamiltonian_follower(const Objective& objective, const Vector& theta, const Vector& p2,
                            const Vector& u1, const Vector& u2, const ControlPartition& part,
                            double alpha, double beta);

/// H1 = <-grad J0(theta) + u1*chi1 + u2*chi2, p1> + w/2 |theta|^2
double hamiltonian_leader(const Objective& objective, const Vector& theta, const Vector& p1,
                          const Vector& u1, const Vector& u2, const ControlPartition& part,
                          double state_weight = 1.0);

/// p2' = -dH2/dtheta = Hess J0(theta) p2 - alpha theta
Vector costate_field_follower(const Objective& objective, const Vector& theta, const Vector& p2,
                              double alpha);

/// p1' = -dH1/dtheta = Hess J0(theta) p1 - w theta
Vector costate_field_leader(const Objective& objective, const Vector& theta, const Vector& p1,
                            double state_weight = 1.0);

/// p1(T): mu (Phi - z) grad Phi in Penalty mode, -grad Phi in PaperFixed mode.
Vector leader_terminal_costate(const LeaderProblem& prob, const Vector& theta_T);

// ---------------------------------------------------------------------------
// Sweeps and functionals

/// Forward sweep of the controlled gradient flow under (u1, u2).
Trajectory forward_sweep(const Objective& objective, const Vector& theta0,
                         const ControlSignal& u1, const ControlSignal& u2,
                         const ControlPartition& part);

/// int 1/2 |theta|^2 dt by composite Simpson, midpoint states taken from
/// the Hermite interpolant. Fourth order, like the RK4 sweep itself.
double state_cost(const Trajectory& traj);

/// J2 evaluated on an existing forward sweep (composite Simpson).
double follower_cost(const FollowerProblem& prob, const Trajectory& traj, const ControlSignal& u2);

struct LeaderCost {
  double J1 = 0.0;     // int 1/2 |theta|^2 dt, unweighted
  double phi = 0.0;    // Phi(theta(T))
  double merit = 0.0;  // the objective the leader descends
};

LeaderCost leader_cost(const LeaderProblem& prob, const Trajectory& traj);

/// Gradient of a cost functional with respect to one control.
///
/// `nodal` holds the pointwise gradient dH/du on the grid nodes.
/// `coefficients` is shaped like the control's coefficient matrix and is the
/// descent direction. For Basis it is int g(t) phi_k(t) dt. For Grid it is
/// int g(t) h_j(t) dt / w_j with h_j the hat function of node j and w_j its
/// trapezoid weight, so it stays close to `nodal` but matches the discrete
/// cost to fourth order. Both integrals use composite Simpson.
struct ControlGradient {
  Matrix nodal;
  Matrix coefficients;
  ControlRepresentation representation = ControlRepresentation::Grid;

  /// Max |coefficients|; the stopping measure. It is the gradient of the
  /// discrete functional that the line search actually decreases.
  double max_norm() const { return coefficients.size() ? coefficients.cwiseAbs().maxCoeff() : 0.0; }

  /// Max |nodal|. Differs from max_norm() by O(dt^2 g''), which is large
  /// across stiff transients the grid does not resolve.
  double pointwise_norm() const { return nodal.size() ? nodal.cwiseAbs().maxCoeff() : 0.0; }
};

/// `nodal` is p x (N_t + 1), `midpoint` is p x N_t.
ControlGradient project_gradient(Matrix nodal, const Matrix& midpoint, const ControlSignal& like);

/// Discrete pairing matching ControlGradient: trapezoid-weighted sum over
/// nodes for Grid controls, plain coefficient dot product for Basis.
double gradient_pairing(const ControlGradient& g, const Matrix& coefficient_direction,
                        const ControlSignal& like);

struct FollowerSweep {
  Trajectory trajectory;
  CostateTrajectory costate;
  double J2 = 0.0;
  ControlGradient gradient;
};

/// Forward sweep, J2, backward sweep with p2(T) = 0, and
/// g2 = (beta u2 + p2) * chi2.
FollowerSweep follower_sweep(const FollowerProblem& prob, const ControlSignal& u2);

/// As above, reusing a forward trajectory already computed for u2.
FollowerSweep follower_sweep(const FollowerProblem& prob, const ControlSignal& u2,
                             Trajectory forward);

ControlGradient control_gradient_follower(const FollowerProblem& prob, const ControlSignal& u2);

struct LeaderSweep {
  Trajectory trajectory;
  CostateTrajectory costate;
  LeaderCost cost;
  ControlGradient gradient;
};

/// Leader backward sweep on a given forward trajectory (which must come from
/// (u1, prob.follower_control)); g1 = p1 * chi1.
LeaderSweep leader_sweep(const LeaderProblem& prob, const ControlSignal& u1, Trajectory forward);

/// As above, computing the forward sweep first.
LeaderSweep leader_sweep(const LeaderProblem& prob, const ControlSignal& u1);

ControlGradient control_gradient_leader(const LeaderProblem& prob, const ControlSignal& u1);

}  // namespace sflow
