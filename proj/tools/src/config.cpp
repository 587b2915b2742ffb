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

#include "sflow/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace sflow::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& s, const std::string& key, int line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw ParseError("config:" + std::to_string(line) + ": " + key + ": '" + s +
                         "' is not a number",
                     line);
  }
  return v;
}

long long parse_integer(const std::string& s, const std::string& key, int line) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("config:" + std::to_string(line) + ": " + key + ": '" + s +
                         "' is not an integer",
                     line);
  }
  return v;
}

Vector parse_vector(const std::string& s, const std::string& key, int line) {
  const auto items = split_list(s);
  Vector v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = parse_real(items[i], key, line);
  }
  return v;
}

std::vector<bool> parse_mask(const std::string& s, const std::string& key, int line) {
  std::vector<bool> out;
  for (const auto& item : split_list(s)) {
    if (item == "1") {
      out.push_back(true);
    } else if (item == "0") {
      out.push_back(false);
    } else {
      throw ParseError("config:" + std::to_string(line) + ": " + key + ": mask entries must be 0 or 1",
                       line);
    }
  }
  return out;
}

std::vector<std::size_t> parse_indices(const std::string& s, const std::string& key, int line) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    const long long v = parse_integer(item, key, line);
    if (v < 1) {
      throw ParseError("config:" + std::to_string(line) + ": " + key + ": indices are 1-based",
                       line);
    }
    out.push_back(static_cast<std::size_t>(v - 1));
  }
  return out;
}

[[noreturn]] void fail(const RunConfig& cfg, const std::string& key, const std::string& msg) {
  const auto it = cfg.key_lines.find(key);
  const int line = it == cfg.key_lines.end() ? 0 : it->second;
  const std::string where = line ? "config:" + std::to_string(line) + ": " : "config: ";
  throw ParseError(where + key + ": " + msg, line);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model",         "data",          "train",         "validation",
      "loss_scale",    "alpha",         "beta",          "gamma1",
      "gamma2",        "eps_tol",       "inner_tol",     "z",
      "mu",            "terminal_mode", "T",             "N_t",
      "u_max",         "theta0",        "leader_mask",   "follower_mask",
      "control",       "basis_size",    "u1_init",       "u2_init",
      "max_outer",     "max_inner",     "output",        "seed",
      "gradcheck_directions", "gradcheck_follower_tol", "gradcheck_leader_tol",
      "gradcheck_corrupt"};
  return keys;
}

Vector broadcast(const Vector& v, Eigen::Index p) {
  if (v.size() == 1 && p > 1) return Vector::Constant(p, v[0]);
  return v;
}

void validate(RunConfig& cfg) {
  const SolverConfig& s = cfg.solver;
  if (!(s.alpha > 0.0)) fail(cfg, "alpha", "must be > 0");
  if (!(s.beta > 0.0)) fail(cfg, "beta", "must be > 0");
  if (!(s.gamma1 >= 0.0 && s.gamma1 <= 1.0)) fail(cfg, "gamma1", "must lie in [0, 1]");
  if (!(s.gamma2 >= 0.0 && s.gamma2 <= 1.0)) fail(cfg, "gamma2", "must lie in [0, 1]");
  if (!(s.eps_tol > 0.0)) fail(cfg, "eps_tol", "must be > 0");
  if (!(s.inner_tol > 0.0)) fail(cfg, "inner_tol", "must be > 0");
  if (!(s.z >= 0.0)) fail(cfg, "z", "must be >= 0");
  if (!(s.mu >= 0.0)) fail(cfg, "mu", "must be >= 0");
  if (!(s.horizon > 0.0)) fail(cfg, "T", "must be > 0");
  if (s.steps < 2) fail(cfg, "N_t", "must be >= 2");
  if (!(s.u_max > 0.0)) fail(cfg, "u_max", "must be > 0");
  if (s.max_outer < 1) fail(cfg, "max_outer", "must be >= 1");
  if (s.max_inner < 0) fail(cfg, "max_inner", "must be >= 0");
  if (cfg.basis_size < 1) fail(cfg, "basis_size", "must be >= 1");
  if (cfg.gradcheck_directions < 1) fail(cfg, "gradcheck_directions", "must be >= 1");
  if (cfg.data_path.empty()) fail(cfg, "data", "is required");
  if (cfg.train.empty()) fail(cfg, "train", "is required");
  if (cfg.validation.empty()) fail(cfg, "validation", "is required");
  {
    std::set<std::size_t> train(cfg.train.begin(), cfg.train.end());
    for (auto i : cfg.validation) {
      if (train.count(i)) fail(cfg, "validation", "overlaps the train split at index " + std::to_string(i + 1));
    }
  }

  Eigen::Index p = cfg.theta0.size();
  if (p == 0) {
    if (cfg.model == ModelKind::Linear) fail(cfg, "theta0", "is required for the linear model");
    p = 2;
    cfg.theta0 = Vector(2);
    cfg.theta0 << 1.0, 0.1;
  }
  if ((cfg.model == ModelKind::MichaelisMenten || cfg.model == ModelKind::Exponential) && p != 2) {
    fail(cfg, "theta0", "this model has 2 parameters");
  }
  if (!cfg.theta0.allFinite()) fail(cfg, "theta0", "must be finite");

  if (cfg.leader_mask.empty()) {
    cfg.leader_mask.assign(static_cast<std::size_t>(p), false);
    cfg.leader_mask[0] = true;
    if (p == 1) cfg.leader_mask[0] = false;
  }
  if (static_cast<Eigen::Index>(cfg.leader_mask.size()) != p) fail(cfg, "leader_mask", "length must equal the parameter dimension");
  if (cfg.follower_mask.empty()) {
    for (bool b : cfg.leader_mask) cfg.follower_mask.push_back(!b);
  }
  if (cfg.follower_mask.size() != cfg.leader_mask.size()) fail(cfg, "follower_mask", "length must equal the parameter dimension");
  for (std::size_t i = 0; i < cfg.leader_mask.size(); ++i) {
    if (cfg.leader_mask[i] && cfg.follower_mask[i]) fail(cfg, "follower_mask", "overlaps leader_mask at coordinate " + std::to_string(i + 1));
    if (!cfg.leader_mask[i] && !cfg.follower_mask[i]) fail(cfg, "follower_mask", "leaves coordinate " + std::to_string(i + 1) + " unassigned");
  }

  if (cfg.u1_init.size() == 0) cfg.u1_init = Vector::Zero(p);
  if (cfg.u2_init.size() == 0) cfg.u2_init = Vector::Zero(p);
  cfg.u1_init = broadcast(cfg.u1_init, p);
  cfg.u2_init = broadcast(cfg.u2_init, p);
  if (cfg.u1_init.size() != p) fail(cfg, "u1_init", "length must be 1 or the parameter dimension");
  if (cfg.u2_init.size() != p) fail(cfg, "u2_init", "length must be 1 or the parameter dimension");
  if (cfg.u1_init.cwiseAbs().maxCoeff() > s.u_max) fail(cfg, "u1_init", "exceeds u_max");
  if (cfg.u2_init.cwiseAbs().maxCoeff() > s.u_max) fail(cfg, "u2_init", "exceeds u_max");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config:" + std::to_string(line) + ": expected 'key = value'", line);
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw ParseError("config:" + std::to_string(line) + ": unknown key '" + key + "'", line);
    }
    if (cfg.key_lines.count(key)) {
      throw ParseError("config:" + std::to_string(line) + ": duplicate key '" + key + "'", line);
    }
    if (value.empty()) {
      throw ParseError("config:" + std::to_string(line) + ": " + key + ": empty value", line);
    }
    cfg.key_lines[key] = line;

    auto bad_choice = [&](const std::string& choices) {
      throw ParseError("config:" + std::to_string(line) + ": " + key + ": expected one of " + choices,
                       line);
    };
    auto as_int = [&] {
      const long long v = parse_integer(value, key, line);
      if (v < -2147483647LL || v > 2147483647LL) {
        throw ParseError("config:" + std::to_string(line) + ": " + key + ": out of range", line);
      }
      return static_cast<int>(v);
    };

    if (key == "model") {
      if (value == "michaelis_menten") cfg.model = ModelKind::MichaelisMenten;
      else if (value == "linear") cfg.model = ModelKind::Linear;
      else if (value == "exponential") cfg.model = ModelKind::Exponential;
      else bad_choice("michaelis_menten, linear, exponential");
    } else if (key == "data") {
      cfg.data_path = base_dir / value;
    } else if (key == "train") {
      cfg.train = parse_indices(value, key, line);
    } else if (key == "validation") {
      cfg.validation = parse_indices(value, key, line);
    } else if (key == "loss_scale") {
      if (value == "half") cfg.loss_scale = LossScale::Half;
      else if (value == "one") cfg.loss_scale = LossScale::One;
      else bad_choice("half, one");
    } else if (key == "alpha") {
      cfg.solver.alpha = parse_real(value, key, line);
    } else if (key == "beta") {
      cfg.solver.beta = parse_real(value, key, line);
    } else if (key == "gamma1") {
      cfg.solver.gamma1 = parse_real(value, key, line);
    } else if (key == "gamma2") {
      cfg.solver.gamma2 = parse_real(value, key, line);
    } else if (key == "eps_tol") {
      cfg.solver.eps_tol = parse_real(value, key, line);
    } else if (key == "inner_tol") {
      cfg.solver.inner_tol = parse_real(value, key, line);
    } else if (key == "z") {
      cfg.solver.z = parse_real(value, key, line);
    } else if (key == "mu") {
      cfg.solver.mu = parse_real(value, key, line);
    } else if (key == "terminal_mode") {
      if (value == "penalty") cfg.solver.terminal_mode = TerminalMode::Penalty;
      else if (value == "paper_fixed") cfg.solver.terminal_mode = TerminalMode::PaperFixed;
      else bad_choice("penalty, paper_fixed");
    } else if (key == "T") {
      cfg.solver.horizon = parse_real(value, key, line);
    } else if (key == "N_t") {
      cfg.solver.steps = as_int();
    } else if (key == "u_max") {
      cfg.solver.u_max = parse_real(value, key, line);
    } else if (key == "theta0") {
      cfg.theta0 = parse_vector(value, key, line);
    } else if (key == "leader_mask") {
      cfg.leader_mask = parse_mask(value, key, line);
    } else if (key == "follower_mask") {
      cfg.follower_mask = parse_mask(value, key, line);
    } else if (key == "control") {
      if (value == "grid") cfg.control = ControlRepresentation::Grid;
      else if (value == "basis") cfg.control = ControlRepresentation::Basis;
      else bad_choice("grid, basis");
    } else if (key == "basis_size") {
      cfg.basis_size = as_int();
    } else if (key == "u1_init") {
      cfg.u1_init = parse_vector(value, key, line);
    } else if (key == "u2_init") {
      cfg.u2_init = parse_vector(value, key, line);
    } else if (key == "max_outer") {
      cfg.solver.max_outer = as_int();
    } else if (key == "max_inner") {
      cfg.solver.max_inner = as_int();
    } else if (key == "output") {
      cfg.output_dir = base_dir / value;
    } else if (key == "seed") {
      const long long v = parse_integer(value, key, line);
      if (v < 0) throw ParseError("config:" + std::to_string(line) + ": seed must be >= 0", line);
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "gradcheck_directions") {
      cfg.gradcheck_directions = as_int();
    } else if (key == "gradcheck_follower_tol") {
      cfg.gradcheck_follower_tol = parse_real(value, key, line);
    } else if (key == "gradcheck_leader_tol") {
      cfg.gradcheck_leader_tol = parse_real(value, key, line);
    } else if (key == "gradcheck_corrupt") {
      cfg.gradcheck_corrupt = parse_real(value, key, line);
    }
  }
  if (!cfg.key_lines.count("output")) cfg.output_dir = base_dir / "out";
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

Dataset parse_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool header_seen = false;
  std::vector<double> ws;
  std::vector<double> vs;
  while (std::getline(in, raw)) {
    ++line;
    const std::string row = trim(raw);
    if (row.empty()) continue;
    auto cols = split_list(row);
    if (!header_seen) {
      if (cols.size() != 2 || cols[0] != "w" || cols[1] != "v") {
        throw ParseError("csv: row " + std::to_string(line) + ": expected header 'w,v'", line);
      }
      header_seen = true;
      continue;
    }
    if (cols.size() != 2) {
      throw ParseError("csv: row " + std::to_string(line) + ": expected 2 columns, found " +
                           std::to_string(cols.size()),
                       line);
    }
    double vals[2];
    for (int c = 0; c < 2; ++c) {
      const std::string& s = cols[static_cast<std::size_t>(c)];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), vals[c]);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(vals[c])) {
        throw ParseError("csv: row " + std::to_string(line) + ": '" + s + "' is not a number", line);
      }
    }
    ws.push_back(vals[0]);
    vs.push_back(vals[1]);
  }
  if (!header_seen) throw ParseError("csv: missing header 'w,v'");
  if (ws.empty()) throw ParseError("csv: no samples");
  return Dataset::from_scalar(ws, vs);
}

Dataset ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str());
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  if (data.input_dim() != 1) throw IoError("csv: only scalar-input datasets can be written");
  std::ofstream out(path);
  if (!out) throw IoError("csv: cannot write '" + path.string() + "'");
  out << "w,v\n";
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto r1 = std::to_chars(buf, buf + sizeof buf, data.input(i)[0]);
    out.write(buf, r1.ptr - buf);
    out << ',';
    auto r2 = std::to_chars(buf, buf + sizeof buf, data.output(i));
    out.write(buf, r2.ptr - buf);
    out << '\n';
  }
  if (!out) throw IoError("csv: write failed for '" + path.string() + "'");
}

}  // namespace sflow::cli
