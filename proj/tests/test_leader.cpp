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

#include <gtest/gtest.h>

#include <random>

#include "sflow/gradcheck.hpp"
#include "sflow/leader.hpp"
#include "support.hpp"

namespace sflow {
namespace {

using testing::vec;

TEST(LeaderStep, ZeroGradientLeavesControl) {
  // theta stays at rest and Phi equals z: the leader costate vanishes.
  const TimeGrid grid(1.0, 50);
  const Objective obj(ModelSpec::linear(1), Dataset::from_scalar({1.0}, {0.0}));
  const LeaderProblem lp{obj, obj, 0.0, 50.0, ControlPartition::from_leader({true}),
                         testing::zero_control(grid, 1), grid, vec({0.0}), TerminalMode::Penalty};
  const ControlSignal u1 = testing::zero_control(grid, 1);
  const LeaderSweep sw = leader_sweep(lp, u1);
  const LeaderStepResult r = leader_step(lp, u1, sw, 1.0);
  EXPECT_EQ(r.grad_norm, 0.0);
  EXPECT_EQ(r.step, 0.0);
  EXPECT_TRUE(r.u1.coefficients() == u1.coefficients());
}

TEST(LeaderStep, DecreasesMeritFromZeroControls) {
  testing::Section4 s;
  const FollowerProblem fp = s.follower();
  const FollowerResult fol = solve_follower(fp, testing::zero_control(fp.grid, 2, s.u_max));
  LeaderProblem lp = s.leader();
  lp.follower_control = fol.u2_star;
  const ControlSignal u1 = testing::zero_control(fp.grid, 2, s.u_max);
  const double before = leader_cost(lp, forward_sweep(lp.objective, lp.theta0, u1, lp.follower_control, lp.partition)).merit;
  const LeaderStepResult r = leader_step(lp, u1, fol, 1.0);
  const double after =
      leader_cost(lp, forward_sweep(lp.objective, lp.theta0, r.u1, lp.follower_control, lp.partition)).merit;
  EXPECT_GT(r.step, 0.0);
  EXPECT_LT(after, before);
  EXPECT_DOUBLE_EQ(r.merit_before, before);
  EXPECT_DOUBLE_EQ(r.merit_after, after);
  // Follower coordinates of u1 are never touched.
  EXPECT_TRUE(r.u1.coefficients().row(1) == u1.coefficients().row(1));
}

TEST(LeaderStep, ZeroStepFreezes) {
  testing::Section4 s;
  const LeaderProblem lp = s.leader();
  const ControlSignal u1 = testing::zero_control(lp.grid, 2, s.u_max);
  const LeaderStepResult r = leader_step(lp, u1, leader_sweep(lp, u1), 0.0);
  EXPECT_EQ(r.status, LoopStatus::Frozen);
  EXPECT_TRUE(r.u1.coefficients() == u1.coefficients());
}

TEST(Nested, ZeroStepsReproduceUncontrolledFlowBitwise) {
  testing::Section4 s;
  SolverConfig cfg = s.config();
  cfg.gamma1 = 0.0;
  cfg.gamma2 = 0.0;
  const Objective obj = s.objective();
  const ControlSignal zero = testing::zero_control(s.grid(), 2, s.u_max);
  const RunReport rep =
      solve_nested(cfg, obj, TerminalTarget{s.validation(), s.z}, s.partition(), s.theta0, zero, zero);
  const VectorField flow = [&](double, const Vector& th) -> Vector { return -obj.gradient(th); };
  const Trajectory plain = integrate_forward(flow, s.theta0, s.grid());
  EXPECT_EQ(rep.theta_final, plain.final_state());
  EXPECT_TRUE(rep.trajectory.states == plain.states);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.outer_iterations, 1);
}

TEST(Nested, FollowerOnlyLqReproducesRiccati) {
  // No leader coordinates: the leader gradient vanishes identically and the
  // nested solve reduces to the follower problem.
  const testing::LqOracle lq;
  const FollowerProblem fp = lq.problem(400);
  SolverConfig cfg;
  cfg.alpha = lq.alpha;
  cfg.beta = lq.beta;
  cfg.mu = 0.0;
  cfg.z = 0.0;
  cfg.inner_tol = 1e-6;
  cfg.max_inner = 2000;
  cfg.horizon = lq.horizon;
  cfg.steps = 400;
  const ControlSignal zero = testing::zero_control(fp.grid, 1);
  const RunReport rep = solve_nested(cfg, fp.objective, TerminalTarget{fp.objective, 0.0}, fp.partition,
                                     fp.theta0, zero, zero);
  ASSERT_TRUE(rep.converged) << rep.stop_reason;
  EXPECT_EQ(rep.outer_iterations, 1);
  double worst = 0.0;
  for (int j = 0; j < fp.grid.num_nodes(); ++j) {
    worst = std::max(worst, std::abs(rep.follower_control->coefficients()(0, j) - lq.control(fp.grid.node(j))));
  }
  EXPECT_LT(worst, 1e-3);
  EXPECT_NEAR(rep.J2_value, lq.optimal_cost(), 1e-5);
}

// A short nested run on the pinned problem, shared by the property tests.
class NestedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    testing::Section4 s;
    SolverConfig cfg = s.config();
    cfg.max_outer = 25;
    const ControlSignal zero = testing::zero_control(s.grid(), 2, s.u_max);
    trace_ = new NestedTrace;
    report_ = new RunReport(solve_nested(cfg, s.objective(), TerminalTarget{s.validation(), s.z}, s.partition(),
                                         s.theta0, zero, zero, trace_));
  }
  static void TearDownTestSuite() {
    delete report_;
    delete trace_;
  }
  static RunReport* report_;
  static NestedTrace* trace_;
};

RunReport* NestedRun::report_ = nullptr;
NestedTrace* NestedRun::trace_ = nullptr;

TEST_F(NestedRun, HistoryComplete) {
  ASSERT_EQ(static_cast<int>(report_->history.size()), report_->outer_iterations);
  for (std::size_t i = 0; i < report_->history.size(); ++i) {
    EXPECT_EQ(report_->history[i].iteration, static_cast<int>(i) + 1);
  }
  EXPECT_EQ(trace_->follower_J2.size(), report_->history.size());
}

TEST_F(NestedRun, LeaderMeritNonIncreasing) {
  ASSERT_FALSE(trace_->leader_steps.empty());
  for (const auto& st : trace_->leader_steps) EXPECT_LE(st.merit_after, st.merit_before);
}

TEST_F(NestedRun, FollowerCostsNonIncreasing) {
  for (const auto& seq : trace_->follower_J2) {
    for (std::size_t i = 1; i < seq.size(); ++i) EXPECT_LE(seq[i], seq[i - 1]);
  }
}

TEST_F(NestedRun, Replayable) {
  testing::Section4 s;
  const Trajectory tr = forward_sweep(s.objective(), s.theta0, *report_->leader_control, *report_->follower_control,
                                      s.partition());
  LeaderProblem lp = s.leader();
  lp.follower_control = *report_->follower_control;
  const LeaderCost c = leader_cost(lp, tr);
  FollowerProblem fp = s.follower();
  fp.leader_control = *report_->leader_control;
  const double J2 = follower_cost(fp, tr, *report_->follower_control);
  EXPECT_NEAR(c.J1, report_->J1_value, 1e-12 * std::abs(report_->J1_value));
  EXPECT_NEAR(c.phi, report_->phi_value, 1e-12);
  EXPECT_NEAR(c.merit, report_->leader_merit, 1e-12 * std::abs(report_->leader_merit));
  EXPECT_NEAR(J2, report_->J2_value, 1e-12);
  EXPECT_EQ(tr.final_state(), report_->theta_final);
}

TEST_F(NestedRun, ReportedResidualsMatchRecomputation) {
  testing::Section4 s;
  LeaderProblem lp = s.leader();
  lp.follower_control = *report_->follower_control;
  const ControlGradient g = control_gradient_leader(lp, *report_->leader_control);
  EXPECT_DOUBLE_EQ(g.max_norm(), report_->leader_residual);
  EXPECT_DOUBLE_EQ(g.pointwise_norm(), report_->leader_pointwise_residual);
  // Pointwise costate on the leader coordinate, sampled directly.
  const LeaderSweep sw = leader_sweep(lp, *report_->leader_control);
  EXPECT_DOUBLE_EQ(sw.costate.costates.row(0).cwiseAbs().maxCoeff(), report_->leader_pointwise_residual);
}

TEST(Nested, ConvergedRunsCarryCertificate) {
  // Two-parameter linear model, leader on one coordinate, follower on the
  // other. Two Legendre terms keep the leader problem well conditioned
  // (J1 has no control cost), so the nested loop converges.
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n(0.0, 1.0);
  int converged = 0;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Vector> x;
    std::vector<double> y;
    for (int i = 0; i < 5; ++i) {
      x.push_back(vec({n(rng), n(rng)}));
      y.push_back(n(rng));
    }
    const Dataset train(x, y);
    const Dataset val({x[0], x[1]}, {y[0] + 0.1, y[1]});
    const Objective obj(ModelSpec::linear(2), train);
    const Objective vobj(ModelSpec::linear(2), val);
    SolverConfig cfg;
    cfg.alpha = 0.1;
    cfg.beta = 0.5;
    cfg.mu = 1.0;
    cfg.z = 0.0;
    cfg.eps_tol = 1e-5;
    cfg.inner_tol = 1e-7;
    cfg.horizon = 1.0;
    cfg.steps = 100;
    cfg.max_outer = 3000;
    const TimeGrid grid(1.0, 100);
    const auto part = ControlPartition::from_leader({true, false});
    const ControlSignal zero = testing::zero_control(grid, 2, 10.0, ControlRepresentation::Basis, 2);
    const Vector theta0 = vec({n(rng), n(rng)});
    const RunReport rep = solve_nested(cfg, obj, TerminalTarget{vobj, 0.0}, part, theta0, zero, zero);
    if (!rep.converged) continue;
    ++converged;
    EXPECT_LE(rep.leader_residual, cfg.eps_tol);
    EXPECT_LE(rep.follower_residual, cfg.inner_tol);

    // Independent check: coordinate slopes of the leader merit and of J2
    // by central differences.
    const ControlSignal& u1 = *rep.leader_control;
    const ControlSignal& u2 = *rep.follower_control;
    const LeaderProblem lp{obj, vobj, 0.0, cfg.mu, part, u2, grid, theta0, TerminalMode::Penalty};
    const FollowerProblem fp{obj, cfg.alpha, cfg.beta, part, u1, grid, theta0};
    const auto merit = [&](const Matrix& a) {
      const ControlSignal u = u1.with_coefficients(a);
      return leader_cost(lp, forward_sweep(obj, theta0, u, u2, part)).merit;
    };
    const auto J2 = [&](const Matrix& a) {
      const ControlSignal u = u2.with_coefficients(a);
      return follower_cost(fp, forward_sweep(obj, theta0, u1, u, part), u);
    };
    for (int k = 0; k < 2; ++k) {
      Matrix e1 = Matrix::Zero(2, 2);
      e1(0, k) = 1.0;
      Matrix e2 = Matrix::Zero(2, 2);
      e2(1, k) = 1.0;
      EXPECT_LE(std::abs(testing::fd_slope(merit, u1.coefficients(), e1, 1e-4)), cfg.eps_tol + 1e-9);
      EXPECT_LE(std::abs(testing::fd_slope(J2, u2.coefficients(), e2, 1e-4)), cfg.inner_tol + 1e-9);
    }
  }
  EXPECT_GT(converged, 0);
}

TEST(ResidualStats, PerfectFit) {
  const ModelSpec mm = ModelSpec::michaelis_menten();
  const Dataset d = Dataset::from_scalar({0.1, 0.2, 0.4}, {2.0 * 0.1 / 0.6, 2.0 * 0.2 / 0.7, 2.0 * 0.4 / 0.9});
  const ResidualStats r = residual_stats(mm, vec({2.0, 0.5}), d);
  EXPECT_NEAR(r.mean, 0.0, 1e-15);
  EXPECT_NEAR(r.std_dev, 0.0, 1e-15);
}

TEST(ResidualStats, Table1AtReportedEstimate) {
  const ResidualStats r = residual_stats(ModelSpec::michaelis_menten(), vec({3.9059, 0.0178}), testing::table1());
  ASSERT_EQ(r.residuals.size(), 7u);
  // Brute force at 30 digits with the m - 1 divisor.
  EXPECT_NEAR(r.mean, 1.09658327436881050e-4, 1e-15);
  EXPECT_NEAR(r.std_dev, 0.0613870041159806541, 1e-14);
  // Published figures: s = 0.0614 to four digits.
  EXPECT_NEAR(r.std_dev, 0.0614, 5e-5);
  EXPECT_NEAR(r.residuals[0], 3.6360 - 3.70771009122006841505, 1e-13);
}

TEST(ResidualStats, PublishedMeanWithinRoundingOfEstimate) {
  // The estimate is published to four decimals. The published mean 7.9772e-4
  // must be attainable by some theta in that rounding box; the mean is
  // monotone in each coordinate, so the corners bound it.
  const ModelSpec mm = ModelSpec::michaelis_menten();
  double lo = 1e300;
  double hi = -1e300;
  double slo = 1e300;
  double shi = -1e300;
  for (double a : {3.90585, 3.90595}) {
    for (double b : {0.01775, 0.01785}) {
      const ResidualStats r = residual_stats(mm, vec({a, b}), testing::table1());
      lo = std::min(lo, r.mean);
      hi = std::max(hi, r.mean);
      slo = std::min(slo, r.std_dev);
      shi = std::max(shi, r.std_dev);
    }
  }
  EXPECT_LT(lo, 7.9772e-4);
  EXPECT_GT(hi, 7.9772e-4);
  EXPECT_LT(slo, 0.06145);
  EXPECT_GT(shi, 0.06135);
}

TEST(ResidualStats, SampleDivisor) {
  const ResidualStats r =
      residual_stats(ModelSpec::linear(1), vec({0.0}), Dataset::from_scalar({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}));
  EXPECT_DOUBLE_EQ(r.mean, 2.0);
  EXPECT_DOUBLE_EQ(r.std_dev, 1.0);
}

}  // namespace
}  // namespace sflow
