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

#include "sflow/cli/commands.hpp"

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include "sflow/cli/report.hpp"

#ifndef SFLOW_VERSION
#define SFLOW_VERSION "0.0.0"
#endif

namespace sflow::cli {

namespace {

using nlohmann::json;

const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::MichaelisMenten: return "michaelis_menten";
    case ModelKind::Linear: return "linear";
    case ModelKind::Exponential: return "exponential";
  }
  return "?";
}

json vec_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mask_json(const std::vector<bool>& m) {
  json out = json::array();
  for (bool b : m) out.push_back(b ? 1 : 0);
  return out;
}

json config_json(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  auto one_based = [](const std::vector<std::size_t>& idx) {
    json out = json::array();
    for (auto i : idx) out.push_back(i + 1);
    return out;
  };
  return {{"model", model_name(c.model)},
          {"data", c.data_path.filename().string()},
          {"train", one_based(c.train)},
          {"validation", one_based(c.validation)},
          {"loss_scale", c.loss_scale == LossScale::Half ? "half" : "one"},
          {"alpha", s.alpha},
          {"beta", s.beta},
          {"gamma1", s.gamma1},
          {"gamma2", s.gamma2},
          {"eps_tol", s.eps_tol},
          {"inner_tol", s.inner_tol},
          {"z", s.z},
          {"mu", s.mu},
          {"terminal_mode", s.terminal_mode == TerminalMode::Penalty ? "penalty" : "paper_fixed"},
          {"T", s.horizon},
          {"N_t", s.steps},
          {"u_max", s.u_max},
          {"theta0", vec_json(c.theta0)},
          {"leader_mask", mask_json(c.leader_mask)},
          {"follower_mask", mask_json(c.follower_mask)},
          {"control", c.control == ControlRepresentation::Grid ? "grid" : "basis"},
          {"basis_size", c.basis_size},
          {"u1_init", vec_json(c.u1_init)},
          {"u2_init", vec_json(c.u2_init)},
          {"max_outer", s.max_outer},
          {"max_inner", s.max_inner}};
}

json residuals_json(const ResidualStats& r) {
  return {{"mean", r.mean}, {"std", r.std_dev}, {"values", r.residuals}};
}

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

// Runs `body`, mapping exceptions to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SingularityError& e) {
    err << "error: solver failed: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const DivergenceError& e) {
    err << "error: solver diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const NoProgressError& e) {
    err << "error: solver stalled: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

ControlSignal initial_control(const RunConfig& c, const TimeGrid& grid, const Vector& value) {
  return ControlSignal::constant(grid, value, c.solver.u_max, c.control, c.basis_size);
}

}  // namespace

const char* version_string() { return SFLOW_VERSION; }

Setup make_setup(const RunConfig& config) {
  try {
    config.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  Dataset data = ingest_csv(config.data_path);
  SplitSpec spec{config.train, config.validation};
  try {
    spec.validate(data.size());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: split: ") + e.what());
  }
  SplitDatasets split = apply_split(data, spec);

  const Eigen::Index p = config.theta0.size();
  ModelSpec model;
  switch (config.model) {
    case ModelKind::MichaelisMenten: model = ModelSpec::michaelis_menten(); break;
    case ModelKind::Exponential: model = ModelSpec::exponential(); break;
    case ModelKind::Linear: model = ModelSpec::linear(p); break;
  }
  if (model.dim != p) throw ParseError("config: theta0 has the wrong length for this model");
  if (config.model == ModelKind::Linear && data.input_dim() != p) {
    throw ParseError("config: linear model needs theta0 of length " + std::to_string(data.input_dim()));
  }

  const TimeGrid grid = make_time_grid(config.solver.horizon, config.solver.steps);
  ControlPartition part = ControlPartition::from_leader(config.leader_mask);
  ControlSignal u1 = initial_control(config, grid, config.u1_init);
  ControlSignal u2 = initial_control(config, grid, config.u2_init);
  Objective objective(model, split.train, config.loss_scale);
  Objective validation(model, split.validation, config.loss_scale);
  return Setup{config,          std::move(data), std::move(split), model,
               std::move(objective), std::move(validation), std::move(part), grid,
               std::move(u1),   std::move(u2)};
}

int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Setup s = make_setup(config);
    prepare_output(config.output_dir);
    const SolverConfig& sc = config.solver;
    const RunReport rep = solve_nested(sc, s.objective, TerminalTarget{s.validation, sc.z},
                                       s.partition, config.theta0, s.u1_init, s.u2_init);
    const ResidualStats stats = residual_stats(s.model, rep.theta_final, s.data);

    json body = {{"command", "fit"},
                 {"version", version_string()},
                 {"config", config_json(config)},
                 {"theta", vec_json(rep.theta_final)},
                 {"J1", rep.J1_value},
                 {"J2", rep.J2_value},
                 {"phi", rep.phi_value},
                 {"leader_merit", rep.leader_merit},
                 {"converged", rep.converged},
                 {"stop_reason", rep.stop_reason},
                 {"outer_iterations", rep.outer_iterations},
                 {"leader_residual", rep.leader_residual},
                 {"follower_residual", rep.follower_residual},
                 {"leader_pointwise_residual", rep.leader_pointwise_residual},
                 {"follower_pointwise_residual", rep.follower_pointwise_residual},
                 {"residuals", residuals_json(stats)},
                 {"history", history_json(rep.history)}};

    const auto& dir = config.output_dir;
    write_text(dir / "report.json", report_text(body, utc_timestamp()));
    write_text(dir / "trajectory.csv", trajectory_csv(rep.trajectory));
    write_text(dir / "controls.csv", controls_csv(*rep.leader_control, *rep.follower_control));
    if (s.data.input_dim() == 1) {
      write_text(dir / "fit_plot.svg", fit_plot_svg(s.model, rep.theta_final, s.data));
    }
    write_text(dir / "residuals_plot.svg", residuals_plot_svg(stats.residuals));

    out << "theta =";
    for (Eigen::Index i = 0; i < rep.theta_final.size(); ++i) out << ' ' << format_real(rep.theta_final[i]);
    out << "\nJ1 = " << format_real(rep.J1_value) << "  J2 = " << format_real(rep.J2_value)
        << "  phi = " << format_real(rep.phi_value) << '\n'
        << "residual mean = " << format_real(stats.mean) << "  std = " << format_real(stats.std_dev) << '\n'
        << "outer iterations = " << rep.outer_iterations << "  converged = " << (rep.converged ? "yes" : "no")
        << " (" << rep.stop_reason << ")\n"
        << "wrote " << dir.string() << '\n';
    return kExitOk;
  });
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Setup s = make_setup(config);
    prepare_output(config.output_dir);
    const Objective& obj = s.objective;
    const VectorField field = [&obj](double, const Vector& theta) -> Vector {
      return -obj.gradient(theta);
    };
    const Trajectory traj = integrate_forward(field, config.theta0, s.grid);
    const Vector theta = traj.final_state();
    const ResidualStats stats = residual_stats(s.model, theta, s.data);

    json body = {{"command", "simulate"},
                 {"version", version_string()},
                 {"config", config_json(config)},
                 {"theta", vec_json(theta)},
                 {"J0", obj.value(theta)},
                 {"phi", s.validation.value(theta)},
                 {"J1", state_cost(traj)},
                 {"residuals", residuals_json(stats)}};
    const auto& dir = config.output_dir;
    write_text(dir / "report.json", report_text(body, utc_timestamp()));
    write_text(dir / "trajectory.csv", trajectory_csv(traj));
    if (s.data.input_dim() == 1) write_text(dir / "fit_plot.svg", fit_plot_svg(s.model, theta, s.data));
    write_text(dir / "residuals_plot.svg", residuals_plot_svg(stats.residuals));

    out << "theta(T) =";
    for (Eigen::Index i = 0; i < theta.size(); ++i) out << ' ' << format_real(theta[i]);
    out << "\nwrote " << dir.string() << '\n';
    return kExitOk;
  });
}

int run_gradcheck(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Setup s = make_setup(config);
    prepare_output(config.output_dir);
    const SolverConfig& sc = config.solver;
    const FollowerProblem fp{s.objective, sc.alpha, sc.beta, s.partition, s.u1_init, s.grid, config.theta0};
    const LeaderProblem lp{s.objective, s.validation,  sc.z,          sc.mu,           s.partition,
                           s.u2_init,   s.grid,        config.theta0, sc.terminal_mode};
    GradientCheckOptions opt;
    opt.directions = config.gradcheck_directions;
    opt.seed = config.seed;
    opt.corrupt_scale = config.gradcheck_corrupt;
    const GradientCheckSummary sum = run_gradient_checks(fp, lp, opt);

    std::string table = "kind,index,finite_difference,adjoint,rel_error\n";
    auto rows = [&table](const char* kind, const std::vector<GradientCheckEntry>& v) {
      for (const auto& e : v) {
        table += std::string(kind) + ',' + std::to_string(e.index) + ',' + format_real(e.finite_difference) +
                 ',' + format_real(e.adjoint) + ',' + format_real(e.rel_error) + '\n';
      }
    };
    rows("follower", sum.follower);
    rows("leader", sum.leader);
    write_text(config.output_dir / "gradcheck.csv", table);

    const double wf = sum.worst_follower();
    const double wl = sum.worst_leader();
    const bool ok_f = wf <= config.gradcheck_follower_tol;
    const bool ok_l = wl <= config.gradcheck_leader_tol;
    out << "follower: " << sum.follower.size() << " directions, worst relative error " << format_real(wf)
        << " (limit " << format_real(config.gradcheck_follower_tol) << ")\n"
        << "leader:   " << sum.leader.size() << " directions, worst relative error " << format_real(wl)
        << " (limit " << format_real(config.gradcheck_leader_tol) << ")\n";
    if (ok_f && ok_l) {
      out << "gradcheck passed\n";
      return kExitOk;
    }
    auto worst = [](const std::vector<GradientCheckEntry>& v) {
      const GradientCheckEntry* w = nullptr;
      for (const auto& e : v) {
        if (!w || !(e.rel_error <= w->rel_error)) w = &e;
      }
      return w;
    };
    const GradientCheckEntry* w = ok_f ? worst(sum.leader) : worst(sum.follower);
    err << "gradcheck failed: " << (ok_f ? "leader" : "follower") << " direction " << w->index
        << ": finite difference " << format_real(w->finite_difference) << ", adjoint "
        << format_real(w->adjoint) << ", relative error " << format_real(w->rel_error) << '\n';
    return kExitGradcheck;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical optimal-control parameter estimation", "sflow"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> out_dir;

  auto add_run = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    return sub;
  };
  CLI::App* fit = add_run("fit", "run the nested leader/follower solve");
  CLI::App* sim = add_run("simulate", "integrate the uncontrolled gradient flow");
  CLI::App* grad = add_run("gradcheck", "compare adjoint gradients with finite differences");
  CLI::App* ver = app.add_subcommand("version", "print the version");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  if (ver->parsed()) {
    out << "sflow " << version_string() << '\n';
    return kExitOk;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (out_dir) config.output_dir = *out_dir;

  if (fit->parsed()) return run_fit(config, out, err);
  if (sim->parsed()) return run_simulate(config, out, err);
  if (grad->parsed()) return run_gradcheck(config, out, err);
  return kExitConfig;
}

}  // namespace sflow::cli
