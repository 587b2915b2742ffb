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

#include "sflow/follower.hpp"

#include <limits>
#include <stdexcept>

#include "sflow/error.hpp"

namespace sflow {

const char* to_string(LoopStatus status) {
  switch (status) {
    case LoopStatus::Converged:
      return "converged";
    case LoopStatus::IterationCap:
      return "iteration cap";
    case LoopStatus::Stalled:
      return "stalled";
    case LoopStatus::Frozen:
      return "frozen";
  }
  return "unknown";
}

FollowerResult solve_follower(const FollowerProblem& prob, const ControlSignal& u2_init,
                              const FollowerOptions& options) {
  prob.validate();
  if (!(options.inner_tol > 0.0)) throw std::invalid_argument("solve_follower: inner_tol must be > 0");
  if (!(options.gamma2 >= 0.0 && options.gamma2 <= 1.0)) {
    throw std::invalid_argument("solve_follower: gamma2 must lie in [0, 1]");
  }

  ControlSignal u2 = u2_init;
  FollowerSweep sweep = follower_sweep(prob, u2);
  std::vector<double> accepted{sweep.J2};

  LoopStatus status = LoopStatus::IterationCap;
  int it = 0;
  for (;; ++it) {
    if (sweep.gradient.max_norm() <= options.inner_tol) {
      status = LoopStatus::Converged;
      break;
    }
    if (options.gamma2 == 0.0) {
      status = LoopStatus::Frozen;
      break;
    }
    if (it >= options.max_inner) {
      status = LoopStatus::IterationCap;
      break;
    }

    double step = options.gamma2;
    bool decreased = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, step *= 0.5) {
      ControlSignal trial =
          u2.with_coefficients(u2.coefficients() - step * sweep.gradient.coefficients);
      Trajectory traj;
      double J = std::numeric_limits<double>::infinity();
      try {
        traj = forward_sweep(prob.objective, prob.theta0, prob.leader_control, trial,
                             prob.partition);
        J = follower_cost(prob, traj, trial);
      } catch (const DivergenceError&) {
      } catch (const SingularityError&) {
      }
      if (J < sweep.J2) {
        u2 = std::move(trial);
        sweep = follower_sweep(prob, u2, std::move(traj));
        accepted.push_back(sweep.J2);
        decreased = true;
        break;
      }
    }
    if (!decreased) {
      if (options.throw_on_stall) {
        throw NoProgressError("solve_follower: no decrease of J2 after " +
                              std::to_string(options.max_halvings) + " step halvings");
      }
      status = LoopStatus::Stalled;
      break;
    }
  }

  FollowerResult out{std::move(u2), std::move(sweep.trajectory), std::move(sweep.costate),
                     std::move(sweep.gradient), sweep.J2, it, 0.0, status, std::move(accepted)};
  out.grad_norm = out.gradient.max_norm();
  return out;
}

}  // namespace sflow
