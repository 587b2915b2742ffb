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

#include "sflow/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sflow {

namespace {

double worst(const std::vector<GradientCheckEntry>& entries) {
  double w = 0.0;
  for (const auto& e : entries) w = std::max(w, e.rel_error);
  return w;
}

}  // namespace

double GradientCheckSummary::worst_follower() const { return worst(follower); }
double GradientCheckSummary::worst_leader() const { return worst(leader); }

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

Matrix random_smooth_coefficients(std::mt19937_64& rng, const ControlSignal& like,
                                  const Vector& mask, double amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index p = like.dim();
  Matrix out = Matrix::Zero(p, like.coefficients().cols());
  if (like.representation() == ControlRepresentation::Basis) {
    const Eigen::Index modes = std::min<Eigen::Index>(out.cols(), 5);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index k = 0; k < modes; ++k) out(i, k) = normal(rng) / (1.0 + k);
    }
  } else {
    const TimeGrid& grid = like.grid();
    constexpr int kModes = 5;
    for (Eigen::Index i = 0; i < p; ++i) {
      double a[kModes];
      double b[kModes];
      for (int k = 0; k < kModes; ++k) {
        a[k] = normal(rng) / (1.0 + k);
        b[k] = normal(rng) / (1.0 + k);
      }
      for (int j = 0; j < grid.num_nodes(); ++j) {
        const double x = std::numbers::pi * grid.node(j) / grid.horizon();
        double v = 0.0;
        for (int k = 0; k < kModes; ++k) v += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
        out(i, j) = v;
      }
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) out.row(i) *= mask[i];

  // Normalize by the max-norm of the evaluated signal, not the coefficients.
  Matrix nodal = out;
  if (like.representation() == ControlRepresentation::Basis) {
    const TimeGrid& grid = like.grid();
    nodal = Matrix::Zero(p, grid.num_nodes());
    for (int j = 0; j < grid.num_nodes(); ++j) {
      for (Eigen::Index k = 0; k < out.cols(); ++k) {
        nodal.col(j) += out.col(k) * legendre_basis(static_cast<int>(k), grid.node(j), grid.horizon());
      }
    }
  }
  const double peak = nodal.size() ? nodal.cwiseAbs().maxCoeff() : 0.0;
  if (peak > 0.0) out *= amplitude / peak;
  return out;
}

GradientCheckEntry check_follower_direction(const FollowerProblem& prob, const ControlSignal& u2,
                                            const Matrix& direction, double step, double scale) {
  auto cost = [&](double s) {
    const ControlSignal u = u2.with_coefficients(u2.coefficients() + s * direction);
    const Trajectory traj =
        forward_sweep(prob.objective, prob.theta0, prob.leader_control, u, prob.partition);
    return follower_cost(prob, traj, u);
  };
  GradientCheckEntry e;
  e.finite_difference = (cost(step) - cost(-step)) / (2.0 * step);
  const FollowerSweep sweep = follower_sweep(prob, u2);
  e.adjoint = scale * gradient_pairing(sweep.gradient, direction, u2);
  e.rel_error = relative_error(e.finite_difference, e.adjoint);
  return e;
}

GradientCheckEntry check_leader_direction(const LeaderProblem& prob, const ControlSignal& u1,
                                          const Matrix& direction, double step, double scale) {
  auto cost = [&](double s) {
    const ControlSignal u = u1.with_coefficients(u1.coefficients() + s * direction);
    const Trajectory traj =
        forward_sweep(prob.objective, prob.theta0, u, prob.follower_control, prob.partition);
    return leader_cost(prob, traj).merit;
  };
  GradientCheckEntry e;
  e.finite_difference = (cost(step) - cost(-step)) / (2.0 * step);
  const LeaderSweep sweep = leader_sweep(prob, u1);
  e.adjoint = scale * gradient_pairing(sweep.gradient, direction, u1);
  e.rel_error = relative_error(e.finite_difference, e.adjoint);
  return e;
}

GradientCheckSummary run_gradient_checks(const FollowerProblem& follower_template,
                                         const LeaderProblem& leader_template,
                                         const GradientCheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  GradientCheckSummary out;
  const ControlPartition& part = follower_template.partition;
  const Vector ones = Vector::Ones(part.dim());
  const ControlSignal& like = follower_template.leader_control;
  const double u_max = like.u_max();
  const bool has_leader = part.leader_mask().sum() > 0.0;
  const bool has_follower = part.follower_mask().sum() > 0.0;

  for (int i = 0; i < options.directions; ++i) {
    const ControlSignal u1 = like.with_coefficients(
        random_smooth_coefficients(rng, like, ones, options.base_fraction * u_max));
    const ControlSignal u2 = like.with_coefficients(
        random_smooth_coefficients(rng, like, ones, options.base_fraction * u_max));

    if (has_follower) {
      FollowerProblem fp = follower_template;
      fp.leader_control = u1;
      const Matrix dir = random_smooth_coefficients(rng, like, part.follower_mask(),
                                                    options.direction_fraction * u_max);
      GradientCheckEntry e =
          check_follower_direction(fp, u2, dir, options.step, options.corrupt_scale);
      e.index = i + 1;
      out.follower.push_back(e);
    }
    if (has_leader) {
      LeaderProblem lp = leader_template;
      lp.follower_control = u2;
      const Matrix dir = random_smooth_coefficients(rng, like, part.leader_mask(),
                                                    options.direction_fraction * u_max);
      GradientCheckEntry e = check_leader_direction(lp, u1, dir, options.step, options.corrupt_scale);
      e.index = i + 1;
      out.leader.push_back(e);
    }
  }
  return out;
}

}  // namespace sflow
