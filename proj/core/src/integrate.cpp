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

#include "sflow/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sflow/error.hpp"

namespace sflow {

namespace {

[[noreturn]] void diverged(const char* what, double t) {
  std::ostringstream os;
  os << what << ": non-finite value at t = " << t;
  throw DivergenceError(os.str(), t);
}

}  // namespace

Trajectory integrate_forward(const VectorField& field, const Vector& y0, const TimeGrid& grid) {
  if (!y0.allFinite()) diverged("forward sweep", 0.0);
  const int n = grid.steps();
  const double dt = grid.dt();

  Trajectory traj{grid, Matrix(y0.size(), n + 1), Matrix(y0.size(), n + 1)};
  traj.states.col(0) = y0;

  Vector y = y0;
  for (int j = 0; j < n; ++j) {
    const double t = grid.node(j);
    const double t_next = grid.node(j + 1);
    const double t_mid = t + 0.5 * dt;
    const Vector k1 = field(t, y);
    const Vector k2 = field(t_mid, y + (0.5 * dt) * k1);
    const Vector k3 = field(t_mid, y + (0.5 * dt) * k2);
    const Vector k4 = field(t_next, y + dt * k3);
    traj.rates.col(j) = k1;
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) diverged("forward sweep", t_next);
    traj.states.col(j + 1) = y;
  }
  const Vector last = field(grid.horizon(), y);
  if (!last.allFinite()) diverged("forward sweep", grid.horizon());
  traj.rates.col(n) = last;
  return traj;
}

CostateTrajectory integrate_backward(const VectorField& field, const Vector& terminal,
                                     const TimeGrid& grid, TerminalKind kind) {
  if (!terminal.allFinite()) diverged("backward sweep", grid.horizon());
  const int n = grid.steps();
  const double dt = grid.dt();

  CostateTrajectory out{grid, Matrix(terminal.size(), n + 1), kind,
                        Matrix(terminal.size(), n + 1)};
  out.costates.col(n) = terminal;

  Vector p = terminal;
  for (int j = n; j > 0; --j) {
    const double t = grid.node(j);
    const double t_prev = grid.node(j - 1);
    const double t_mid = t - 0.5 * dt;
    const Vector k1 = field(t, p);
    out.rates.col(j) = k1;
    const Vector k2 = field(t_mid, p - (0.5 * dt) * k1);
    const Vector k3 = field(t_mid, p - (0.5 * dt) * k2);
    const Vector k4 = field(t_prev, p - dt * k3);
    p -= (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!p.allFinite()) diverged("backward sweep", t_prev);
    out.costates.col(j - 1) = p;
  }
  const Vector first = field(0.0, p);
  if (!first.allFinite()) diverged("backward sweep", 0.0);
  out.rates.col(0) = first;
  return out;
}

Matrix hermite_midpoints(const Matrix& values, const Matrix& rates, const TimeGrid& grid) {
  const int n = grid.steps();
  if (values.cols() != n + 1 || rates.cols() != n + 1 || rates.rows() != values.rows()) {
    throw std::invalid_argument("hermite_midpoints: need values and rates at every node");
  }
  const double dt = grid.dt();
  Matrix mid(values.rows(), n);
  for (int j = 0; j < n; ++j) {
    mid.col(j) = 0.5 * (values.col(j) + values.col(j + 1)) +
                 (dt / 8.0) * (rates.col(j) - rates.col(j + 1));
  }
  return mid;
}

Vector interpolate_state(const Trajectory& traj, double t) {
  const TimeGrid& grid = traj.grid;
  if (!(t >= 0.0 && t <= grid.horizon())) {
    std::ostringstream os;
    os << "interpolate_state: time " << t << " outside [0, " << grid.horizon() << "]";
    throw std::out_of_range(os.str());
  }
  const int n = grid.steps();
  const double dt = grid.dt();
  const int j = std::clamp(static_cast<int>(std::floor(t / dt)), 0, n - 1);
  const double t0 = grid.node(j);
  if (t == t0) return traj.states.col(j);
  if (t == grid.node(j + 1)) return traj.states.col(j + 1);

  const double s = std::clamp((t - t0) / dt, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * traj.states.col(j) + (h10 * dt) * traj.rates.col(j) +
         h01 * traj.states.col(j + 1) + (h11 * dt) * traj.rates.col(j + 1);
}

}  // namespace sflow
