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

#include <vector>

#include "sflow/follower.hpp"

namespace sflow {

struct LeaderStepResult {
  ControlSignal u1;
  double grad_norm = 0.0;
  double merit_before = 0.0;
  double merit_after = 0.0;
  /// Accepted step size after halving; 0 if u1 was left unchanged.
  double step = 0.0;
  LoopStatus status = LoopStatus::Converged;
};

/// One leader correction with the follower response frozen:
/// u1 <- clamp(u1 - gamma * p1 * chi1), halving gamma until the leader merit
/// decreases. Throws NoProgressError after `max_halvings` failed halvings.
LeaderStepResult leader_step(const LeaderProblem& prob, const ControlSignal& u1,
                             const LeaderSweep& sweep, double gamma1, int max_halvings = 30);

/// As above; `follower_out` must be the response to `u1` (its trajectory is
/// reused as the leader's forward sweep).
LeaderStepResult leader_step(const LeaderProblem& prob, const ControlSignal& u1,
                             const FollowerResult& follower_out, double gamma1,
                             int max_halvings = 30);

/// Validation functional and target for the nested solve.
struct TerminalTarget {
  Objective validation;
  double z = 0.005;
};

/// The nested successive-approximation driver. Each outer iteration solves
/// the follower (warm-started from the previous response), evaluates the
/// leader extremum residual, stops if it is at most eps_tol, and otherwise
/// takes one leader step. Hitting max_outer is reported through
/// RunReport::converged = false rather than thrown.
RunReport solve_nested(const SolverConfig& config, const Objective& objective,
                       const TerminalTarget& target, const ControlPartition& partition,
                       const Vector& theta0, const ControlSignal& u1_init,
                       const ControlSignal& u2_init);

/// Leader step records kept alongside the report for descent diagnostics.
struct NestedTrace {
  std::vector<LeaderStepResult> leader_steps;
  std::vector<std::vector<double>> follower_J2;
};

RunReport solve_nested(const SolverConfig& config, const Objective& objective,
                       const TerminalTarget& target, const ControlPartition& partition,
                       const Vector& theta0, const ControlSignal& u1_init,
                       const ControlSignal& u2_init, NestedTrace* trace);

struct ResidualStats {
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation, divisor m - 1
  std::vector<double> residuals;  // y_i - h_theta(x_i)
};

ResidualStats residual_stats(const ModelSpec& model, const Vector& theta, const Dataset& data);

}  // namespace sflow
