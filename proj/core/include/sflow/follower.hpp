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

#include "sflow/adjoint.hpp"

namespace sflow {

/// How an iterative control update loop ended.
enum class LoopStatus {
  Converged,     // extremum residual at or below tolerance
  IterationCap,  // ran out of iterations
  Stalled,       // backtracking could not decrease the objective
  Frozen,        // zero step size, no updates attempted
};

const char* to_string(LoopStatus status);

struct FollowerOptions {
  double inner_tol = 1e-6;
  int max_inner = 500;
  double gamma2 = 1.0;
  int max_halvings = 30;
  /// Throw NoProgressError when backtracking stalls; otherwise return the
  /// best iterate with status Stalled.
  bool throw_on_stall = true;
};

/// The follower's response to a fixed leader control.
struct FollowerResult {
  ControlSignal u2_star;
  Trajectory trajectory;
  CostateTrajectory costate;
  ControlGradient gradient;
  double J2_value = 0.0;
  int inner_iterations = 0;
  /// Max-norm of the extremum residual (beta u2 + p2) * chi2 at exit, taken
  /// over grid nodes (Grid) or basis coefficients (Basis).
  double grad_norm = 0.0;
  LoopStatus status = LoopStatus::IterationCap;
  /// J2 of the initial iterate followed by every accepted iterate.
  std::vector<double> accepted_J2;

  bool converged() const { return status == LoopStatus::Converged; }
};

/// Successive approximation for the follower: forward sweep, backward sweep,
/// correction u2 <- u2 - gamma * (beta u2 + p2) * chi2 with step halving
/// until J2 decreases, then clamp. gamma restarts at gamma2 every iteration.
FollowerResult solve_follower(const FollowerProblem& prob, const ControlSignal& u2_init,
                              const FollowerOptions& options = {});

inline FollowerResult solve_follower(const FollowerProblem& prob, const ControlSignal& u2_init,
                                     double inner_tol, int max_inner) {
  FollowerOptions options;
  options.inner_tol = inner_tol;
  options.max_inner = max_inner;
  return solve_follower(prob, u2_init, options);
}

}  // namespace sflow
