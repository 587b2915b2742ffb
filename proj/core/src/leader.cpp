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

#include "sflow/leader.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "sflow/error.hpp"

namespace sflow {

LeaderStepResult leader_step(const LeaderProblem& prob, const ControlSignal& u1,
                             const LeaderSweep& sweep, double gamma1, int max_halvings) {
  LeaderStepResult out{u1, sweep.gradient.max_norm(), sweep.cost.merit, sweep.cost.merit, 0.0,
                       LoopStatus::Converged};
  if (gamma1 == 0.0) {
    out.status = LoopStatus::Frozen;
    return out;
  }
  if (out.grad_norm == 0.0) return out;

  double step = gamma1;
  for (int halving = 0; halving <= max_halvings; ++halving, step *= 0.5) {
    ControlSignal trial =
        u1.with_coefficients(u1.coefficients() - step * sweep.gradient.coefficients);
    double merit = std::numeric_limits<double>::infinity();
    try {
      const Trajectory traj =
          forward_sweep(prob.objective, prob.theta0, trial, prob.follower_control, prob.partition);
      merit = leader_cost(prob, traj).merit;
    } catch (const DivergenceError&) {
    } catch (const SingularityError&) {
    }
    if (merit < sweep.cost.merit) {
      out.u1 = std::move(trial);
      out.merit_after = merit;
      out.step = step;
      return out;
    }
  }
  throw NoProgressError("leader_step: no decrease of the leader objective after " +
                        std::to_string(max_halvings) + " step halvings");
}

LeaderStepResult leader_step(const LeaderProblem& prob, const ControlSignal& u1,
                             const FollowerResult& follower_out, double gamma1,
                             int max_halvings) {
  const LeaderSweep sweep = leader_sweep(prob, u1, follower_out.trajectory);
  return leader_step(prob, u1, sweep, gamma1, max_halvings);
}

RunReport solve_nested(const SolverConfig& config, const Objective& objective,
                       const TerminalTarget& target, const ControlPartition& partition,
                       const Vector& theta0, const ControlSignal& u1_init,
                       const ControlSignal& u2_init) {
  return solve_nested(config, objective, target, partition, theta0, u1_init, u2_init, nullptr);
}

RunReport solve_nested(const SolverConfig& config, const Objective& objective,
                       const TerminalTarget& target, const ControlPartition& partition,
                       const Vector& theta0, const ControlSignal& u1_init,
                       const ControlSignal& u2_init, NestedTrace* trace) {
  config.validate();
  const TimeGrid grid = u1_init.grid();
  if (!(u2_init.grid() == grid)) {
    throw std::invalid_argument("solve_nested: initial controls live on different grids");
  }

  FollowerOptions fopt;
  fopt.inner_tol = config.inner_tol;
  fopt.max_inner = config.max_inner;
  fopt.gamma2 = config.gamma2;
  fopt.throw_on_stall = false;

  ControlSignal u1 = u1_init;
  ControlSignal u2 = u2_init;
  RunReport report;

  for (int n = 1; n <= config.max_outer; ++n) {
    const FollowerProblem fprob{objective, config.alpha, config.beta, partition, u1, grid, theta0};
    FollowerResult fol = solve_follower(fprob, u2, fopt);
    u2 = fol.u2_star;
    if (trace) trace->follower_J2.push_back(fol.accepted_J2);

    const LeaderProblem lprob{objective, target.validation, target.z,          config.mu,
                              partition, u2,                grid,              theta0,
                              config.terminal_mode};
    LeaderSweep sweep = leader_sweep(lprob, u1, fol.trajectory);
    const double g1 = sweep.gradient.max_norm();

    IterationRecord rec;
    rec.iteration = n;
    rec.leader_grad_norm = g1;
    rec.follower_grad_norm = fol.grad_norm;
    rec.J1 = sweep.cost.J1;
    rec.J2 = fol.J2_value;
    rec.phi = sweep.cost.phi;
    rec.leader_merit = sweep.cost.merit;
    rec.inner_iterations = fol.inner_iterations;
    report.history.push_back(rec);

    report.outer_iterations = n;
    report.theta_final = sweep.trajectory.final_state();
    report.J1_value = sweep.cost.J1;
    report.J2_value = fol.J2_value;
    report.phi_value = sweep.cost.phi;
    report.leader_merit = sweep.cost.merit;
    report.leader_residual = g1;
    report.follower_residual = fol.grad_norm;
    report.leader_pointwise_residual = sweep.gradient.pointwise_norm();
    report.follower_pointwise_residual = fol.gradient.pointwise_norm();
    report.trajectory = std::move(sweep.trajectory);
    report.leader_control = u1;
    report.follower_control = u2;

    if (g1 <= config.eps_tol) {
      report.converged = fol.converged();
      report.stop_reason = fol.converged() ? "converged" : "leader stationary, follower not converged";
      break;
    }
    if (n == config.max_outer) {
      report.stop_reason = "iteration cap";
      break;
    }
    if (config.gamma1 == 0.0) {
      report.stop_reason = "frozen leader control";
      break;
    }

    std::optional<LeaderStepResult> step;
    try {
      step = leader_step(lprob, u1, sweep, config.gamma1);
    } catch (const NoProgressError&) {
      report.stop_reason = "leader step stalled";
      break;
    }
    report.history.back().leader_step = step->step;
    if (trace) trace->leader_steps.push_back(*step);
    u1 = std::move(step->u1);
  }
  return report;
}

ResidualStats residual_stats(const ModelSpec& model, const Vector& theta, const Dataset& data) {
  ResidualStats s;
  s.residuals.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.residuals.push_back(data.output(i) - predict(model, theta, data.input(i)));
  }
  const auto m = static_cast<double>(s.residuals.size());
  double sum = 0.0;
  for (double r : s.residuals) sum += r;
  s.mean = sum / m;
  if (s.residuals.size() > 1) {
    double ss = 0.0;
    for (double r : s.residuals) ss += (r - s.mean) * (r - s.mean);
    s.std_dev = std::sqrt(ss / (m - 1.0));
  }
  return s;
}

}  // namespace sflow
