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

#include <cstdint>
#include <random>
#include <vector>

#include "sflow/adjoint.hpp"

namespace sflow {

/// One directional-derivative comparison: central difference of the cost
/// functional along a control perturbation versus the adjoint pairing.
struct GradientCheckEntry {
  int index = 0;
  double finite_difference = 0.0;
  double adjoint = 0.0;
  double rel_error = 0.0;
};

struct GradientCheckSummary {
  std::vector<GradientCheckEntry> follower;
  std::vector<GradientCheckEntry> leader;

  double worst_follower() const;
  double worst_leader() const;
};

/// |a - b| / max(|a|, |b|), with 0/0 read as agreement.
double relative_error(double a, double b);

/// Random smooth coefficient matrix shaped like `like`, restricted to the
/// coordinates flagged in `mask`, with max-norm `amplitude`. Grid controls
/// get a short random cosine/sine series; Basis controls random low-order
/// coefficients.
Matrix random_smooth_coefficients(std::mt19937_64& rng, const ControlSignal& like,
                                  const Vector& mask, double amplitude);

/// `scale` multiplies the adjoint side; anything other than 1 is a fault
/// injection used to exercise the failure path.
GradientCheckEntry check_follower_direction(const FollowerProblem& prob, const ControlSignal& u2,
                                            const Matrix& direction, double step,
                                            double scale = 1.0);

GradientCheckEntry check_leader_direction(const LeaderProblem& prob, const ControlSignal& u1,
                                          const Matrix& direction, double step,
                                          double scale = 1.0);

struct GradientCheckOptions {
  int directions = 20;
  std::uint64_t seed = 42;
  double step = 1e-4;
  /// Base controls are drawn with max-norm base_fraction * u_max and
  /// perturbations with direction_fraction * u_max.
  double base_fraction = 0.4;
  double direction_fraction = 0.2;
  double corrupt_scale = 1.0;
};

/// Randomized adjoint-exactness protocol. `follower_template` and
/// `leader_template` supply everything except the controls, which are
/// redrawn for each direction (random smooth u1, u2 and perturbation).
GradientCheckSummary run_gradient_checks(const FollowerProblem& follower_template,
                                         const LeaderProblem& leader_template,
                                         const GradientCheckOptions& options);

}  // namespace sflow
