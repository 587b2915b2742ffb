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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "sflow/cli/commands.hpp"
#include "sflow/cli/config.hpp"
#include "support.hpp"

namespace {

using namespace sflow;
using sflow::testing::vec;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

cli::Setup golden(std::function<void(cli::RunConfig&)> tweak = {}) {
  cli::RunConfig c = cli::load_config(sflow::testing::golden_config_path());
  if (tweak) tweak(c);
  return cli::make_setup(c);
}

RunReport run_golden(const cli::Setup& s) {
  const auto& c = s.config;
  return solve_nested(c.solver, s.objective, TerminalTarget{s.validation, c.solver.z}, s.partition, c.theta0,
                      s.u1_init, s.u2_init);
}

// 1. Adjoint gradients against central differences, 20 random directions.
Outcome adjoint_certification() {
  const auto t0 = Clock::now();
  const cli::Setup s = golden();
  const SolverConfig& sc = s.config.solver;
  const FollowerProblem fp{s.objective, sc.alpha, sc.beta, s.partition, s.u1_init, s.grid, s.config.theta0};
  const LeaderProblem lp{s.objective, s.validation, sc.z, sc.mu, s.partition,
                         s.u2_init,   s.grid,       s.config.theta0, sc.terminal_mode};
  GradientCheckOptions opt;
  opt.directions = 20;
  opt.seed = 20260101;
  const GradientCheckSummary sum = run_gradient_checks(fp, lp, opt);
  const double secs = seconds_since(t0);
  const bool ok = sum.follower.size() == 20 && sum.leader.size() == 20 && sum.worst_follower() < 1e-4 &&
                  sum.worst_leader() < 1e-3 && secs < 30.0;
  return {ok, "follower worst " + fmt("%.3g", sum.worst_follower()) + " (< 1e-4), leader worst " +
                  fmt("%.3g", sum.worst_leader()) + " (< 1e-3), " + fmt("%.2f", secs) + " s"};
}

// 2. Scalar LQ follower against the closed-form Riccati solution.
Outcome lq_oracle() {
  const auto t0 = Clock::now();
  const sflow::testing::LqOracle lq;
  const FollowerProblem fp = lq.problem(400);
  const FollowerResult r = solve_follower(fp, sflow::testing::zero_control(fp.grid, 1), 1e-6, 2000);
  double worst = 0.0;
  for (int j = 0; j < fp.grid.num_nodes(); ++j) {
    worst = std::max(worst, std::abs(r.u2_star.coefficients()(0, j) - lq.control(fp.grid.node(j))));
  }
  const double dJ = std::abs(r.J2_value - lq.optimal_cost());
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-3 && dJ <= 1e-5 && secs < 10.0;
  return {ok && r.converged(), "max control error " + fmt("%.3g", worst) + ", J2 error " + fmt("%.3g", dJ) +
                                   ", " + to_string(r.status) + ", " + fmt("%.2f", secs) + " s"};
}

// 3. Reproduction of the published estimate with the pinned configuration.
struct Reproduction {
  Outcome outcome;
  RunReport report;
};

Reproduction reproduction() {
  const auto t0 = Clock::now();
  const cli::Setup s = golden();
  RunReport rep = run_golden(s);
  const ResidualStats st = residual_stats(s.model, rep.theta_final, s.data);
  const double secs = seconds_since(t0);
  const double t0v = rep.theta_final[0];
  const double t1v = rep.theta_final[1];
  const bool ok = rep.phi_value <= 0.005 + 1e-3 && std::abs(t0v - 3.9059) <= 0.05 * 3.9059 &&
                  std::abs(t1v - 0.0178) <= 0.25 * 0.0178 && std::abs(st.mean) <= 5e-3 &&
                  std::abs(st.std_dev - 0.0614) <= 0.1 * 0.0614 && secs < 120.0;
  std::string d = "theta=(" + fmt("%.5f", t0v) + ", " + fmt("%.5f", t1v) + "), phi " + fmt("%.5f", rep.phi_value) +
                  ", residual mean " + fmt("%.3g", st.mean) + ", std " + fmt("%.4f", st.std_dev) + ", " +
                  std::to_string(rep.outer_iterations) + " outer iterations (" + rep.stop_reason + "), " +
                  fmt("%.1f", secs) + " s";
  return {{ok, d}, std::move(rep)};
}

// 4. Zero step sizes and zero controls reduce to the uncontrolled flow.
Outcome reduction() {
  const auto t0 = Clock::now();
  const cli::Setup s = golden([](cli::RunConfig& c) {
    c.solver.gamma1 = 0.0;
    c.solver.gamma2 = 0.0;
  });
  const RunReport rep = run_golden(s);
  const Objective& obj = s.objective;
  const VectorField flow = [&](double, const Vector& th) -> Vector { return -obj.gradient(th); };
  const Trajectory plain = integrate_forward(flow, s.config.theta0, s.grid);
  const double secs = seconds_since(t0);
  const bool same = rep.trajectory.states == plain.states && rep.theta_final == plain.final_state();
  return {same && secs < 1.0, std::string(same ? "bitwise identical" : "trajectories differ") + " over " +
                                  std::to_string(s.grid.num_nodes()) + " nodes, " + fmt("%.3f", secs) + " s"};
}

// 5. RK4 order on y' = -y.
Outcome integrator_order() {
  const VectorField decay = [](double, const Vector& y) -> Vector { return -y; };
  auto err = [&](int n) {
    return std::abs(integrate_forward(decay, vec({1.0}), TimeGrid(1.0, n)).final_state()[0] - std::exp(-1.0));
  };
  bool ok = true;
  std::string d = "error ratios";
  int n = 10;
  double prev = err(n);
  for (int r = 0; r < 3; ++r) {
    n *= 2;
    const double cur = err(n);
    ok = ok && prev / cur >= 12.0;
    d += " " + fmt("%.2f", prev / cur);
    prev = cur;
  }
  return {ok, d + " (each >= 12)"};
}

// 6. Accepted steps never increase J2 (inner) or the leader merit (outer).
Outcome monotone_descent() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  const Dataset base = sflow::testing::table1();
  int inner_steps = 0;
  int outer_steps = 0;
  int violations = 0;
  int failures = 0;
  for (int inst = 0; inst < 10; ++inst) {
    std::vector<double> w;
    std::vector<double> v;
    for (std::size_t i = 0; i < base.size(); ++i) {
      w.push_back(base.input(i)[0]);
      v.push_back(base.output(i) + noise(rng));
    }
    const SplitDatasets split = apply_split(Dataset::from_scalar(w, v), sflow::testing::table1_split());
    const LossScale scale = inst % 2 ? LossScale::One : LossScale::Half;
    const Objective obj(ModelSpec::michaelis_menten(), split.train, scale);
    const Objective val(ModelSpec::michaelis_menten(), split.validation, scale);
    SolverConfig cfg;
    cfg.mu = std::pow(10.0, 1.0 + 4.0 * u(rng));
    cfg.u_max = 0.5;
    cfg.max_outer = 15;
    cfg.max_inner = 50;
    const TimeGrid grid(cfg.horizon, cfg.steps);
    const Vector theta0 = vec({3.5 + u(rng), 0.05 + 0.1 * u(rng)});
    const ControlSignal zero = sflow::testing::zero_control(grid, 2, cfg.u_max);
    NestedTrace trace;
    try {
      solve_nested(cfg, obj, TerminalTarget{val, cfg.z}, ControlPartition::from_leader({true, false}), theta0, zero,
                   zero, &trace);
    } catch (const std::exception&) {
      ++failures;
      continue;
    }
    for (const auto& seq : trace.follower_J2) {
      for (std::size_t i = 1; i < seq.size(); ++i) {
        ++inner_steps;
        if (seq[i] > seq[i - 1]) ++violations;
      }
    }
    for (const auto& st : trace.leader_steps) {
      if (st.step == 0.0) continue;
      ++outer_steps;
      if (st.merit_after > st.merit_before) ++violations;
    }
  }
  const bool ok = violations == 0 && failures == 0 && inner_steps > 0 && outer_steps > 0;
  return {ok, "10 instances, " + std::to_string(inner_steps) + " inner and " + std::to_string(outer_steps) +
                  " outer accepted steps, " + std::to_string(violations) + " increases, " +
                  std::to_string(failures) + " solver failures"};
}

// 7. converged=true implies both extremum residuals are within tolerance.
// Residuals are recomputed from fresh sweeps, and stationarity is checked
// independently by central differences of the leader merit and of J2.
Outcome certificate(const std::vector<std::pair<std::string, RunReport>>& pinned_runs) {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> n(0.0, 1.0);
  int converged = 0;
  int runs = 0;
  int bad = 0;
  double worst1 = 0.0;
  double worst2 = 0.0;
  auto verify = [&](const RunReport& rep, const Objective& obj, const Objective& vobj, const SolverConfig& cfg,
                    const ControlPartition& part, const Vector& theta0) {
    ++runs;
    if (!rep.converged) return;
    ++converged;
    const ControlSignal& u1 = *rep.leader_control;
    const ControlSignal& u2 = *rep.follower_control;
    const TimeGrid& grid = u1.grid();
    const FollowerProblem fp{obj, cfg.alpha, cfg.beta, part, u1, grid, theta0};
    const LeaderProblem lp{obj, vobj, cfg.z, cfg.mu, part, u2, grid, theta0, cfg.terminal_mode};
    const double r1 = leader_sweep(lp, u1).gradient.max_norm();
    const double r2 = follower_sweep(fp, u2).gradient.max_norm();
    worst1 = std::max(worst1, r1 / cfg.eps_tol);
    worst2 = std::max(worst2, r2 / cfg.inner_tol);
    bool ok = r1 <= cfg.eps_tol && r2 <= cfg.inner_tol;

    const auto merit = [&](const Matrix& a) {
      const ControlSignal u = u1.with_coefficients(a);
      return leader_cost(lp, forward_sweep(obj, theta0, u, u2, part)).merit;
    };
    const auto J2 = [&](const Matrix& a) {
      const ControlSignal u = u2.with_coefficients(a);
      return follower_cost(fp, forward_sweep(obj, theta0, u1, u, part), u);
    };
    for (int k = 0; k < 4; ++k) {
      const Matrix d1 = random_smooth_coefficients(rng, u1, part.leader_mask(), 1.0);
      const Matrix d2 = random_smooth_coefficients(rng, u2, part.follower_mask(), 1.0);
      const double s1 = sflow::testing::fd_slope(merit, u1.coefficients(), d1, 1e-4);
      const double s2 = sflow::testing::fd_slope(J2, u2.coefficients(), d2, 1e-4);
      ok = ok && std::abs(s1) <= cfg.eps_tol * sflow::testing::pairing_bound(u1, d1) + 1e-9;
      ok = ok && std::abs(s2) <= cfg.inner_tol * sflow::testing::pairing_bound(u2, d2) + 1e-9;
    }
    if (!ok) ++bad;
  };

  // Linear instances with two Legendre terms per control: J1 carries no
  // control cost, and a low-order basis keeps the leader well conditioned.
  for (int inst = 0; inst < 6; ++inst) {
    std::vector<Vector> x;
    std::vector<double> y;
    for (int i = 0; i < 5; ++i) {
      x.push_back(vec({n(rng), n(rng)}));
      y.push_back(n(rng));
    }
    const Objective obj(ModelSpec::linear(2), Dataset(x, y));
    const Objective vobj(ModelSpec::linear(2), Dataset({x[0], x[1]}, {y[0] + 0.1, y[1]}));
    SolverConfig cfg;
    cfg.alpha = 0.1;
    cfg.beta = 0.5;
    cfg.mu = 1.0;
    cfg.z = 0.0;
    cfg.inner_tol = 1e-7;
    cfg.horizon = 1.0;
    cfg.steps = 100;
    cfg.max_outer = 3000;
    const TimeGrid grid(1.0, 100);
    const auto part = ControlPartition::from_leader({true, false});
    const ControlSignal zero = sflow::testing::zero_control(grid, 2, 10.0, ControlRepresentation::Basis, 2);
    const Vector theta0 = vec({n(rng), n(rng)});
    verify(solve_nested(cfg, obj, TerminalTarget{vobj, 0.0}, part, theta0, zero, zero), obj, vobj, cfg, part,
           theta0);
  }
  const cli::Setup s = golden();
  for (const auto& [name, rep] : pinned_runs) {
    verify(rep, s.objective, s.validation, s.config.solver, s.partition, s.config.theta0);
  }
  const bool ok = bad == 0 && converged > 0;
  return {ok, std::to_string(runs) + " runs, " + std::to_string(converged) + " converged, " + std::to_string(bad) +
                  " certificate violations, worst residual/tol leader " + fmt("%.3g", worst1) + " follower " +
                  fmt("%.3g", worst2)};
}

// 8. Twelve Legendre coefficients against the grid representation.
Outcome basis_vs_grid(const RunReport& grid_run, RunReport* basis_out) {
  const cli::Setup s = golden([](cli::RunConfig& c) {
    c.control = ControlRepresentation::Basis;
    c.basis_size = 12;
  });
  *basis_out = run_golden(s);
  const double d1 = std::abs(basis_out->J1_value - grid_run.J1_value) / std::abs(grid_run.J1_value);
  const double d2 = std::abs(basis_out->J2_value - grid_run.J2_value) / std::abs(grid_run.J2_value);
  return {d1 <= 0.02 && d2 <= 0.02,
          "J1 " + fmt("%.6g", basis_out->J1_value) + " vs " + fmt("%.6g", grid_run.J1_value) + " (" +
              fmt("%.3g", 100 * d1) + "%), J2 " + fmt("%.6g", basis_out->J2_value) + " vs " +
              fmt("%.6g", grid_run.J2_value) + " (" + fmt("%.3g", 100 * d2) + "%)"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* name, const Outcome& o) {
    std::printf("criterion %d %-24s %s  %s\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "adjoint certification", guarded(adjoint_certification));
  report(2, "LQ oracle", guarded(lq_oracle));
  RunReport grid_run;
  report(3, "reproduction", guarded([&] {
           Reproduction r = reproduction();
           grid_run = std::move(r.report);
           return r.outcome;
         }));
  report(4, "reduction invariant", guarded(reduction));
  report(5, "integrator order", guarded(integrator_order));
  report(6, "monotone descent", guarded(monotone_descent));
  RunReport basis_run;
  const Outcome c8 = guarded([&] { return basis_vs_grid(grid_run, &basis_run); });
  report(7, "convergence certificate", guarded([&] {
           return certificate({{"grid", grid_run}, {"basis", basis_run}});
         }));
  report(8, "basis vs grid", c8);
  std::printf("%s: %d of 8 criteria failed\n", failed ? "FAILED" : "OK", failed);
  return failed ? 1 : 0;
}
