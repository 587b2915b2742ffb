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

#include <functional>

#include "sflow/core.hpp"

namespace sflow {

/// Right-hand side (t, y) -> dy/dt. Must be deterministic.
using VectorField = std::function<Vector(double, const Vector&)>;

/// Classical fixed-step RK4 from y(0) = y0 over every grid step.
///
/// The returned trajectory also stores the field evaluated at each node so
/// that interpolate_state() can build a C1 Hermite interpolant. Throws
/// DivergenceError at the first node whose state is not finite.
Trajectory integrate_forward(const VectorField& field, const Vector& y0, const TimeGrid& grid);

/// Classical RK4 run backward from p(T) = terminal down to t = 0. The
/// terminal node is stored exactly as given.
CostateTrajectory integrate_backward(const VectorField& field, const Vector& terminal,
                                     const TimeGrid& grid,
                                     TerminalKind kind = TerminalKind::FollowerZero);

/// Cubic Hermite interpolation of a stored trajectory. Returns the stored
/// node value bitwise when t is a grid node. Throws std::out_of_range for
/// t outside [0, T].
Vector interpolate_state(const Trajectory& traj, double t);

/// Hermite values at the interval midpoints, one column per step:
/// (y_j + y_{j+1}) / 2 + dt (r_j - r_{j+1}) / 8.
Matrix hermite_midpoints(const Matrix& values, const Matrix& rates, const TimeGrid& grid);

}  // namespace sflow
