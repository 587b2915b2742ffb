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

#include "sflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sflow {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<Vector> inputs, std::vector<double> outputs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (inputs_.size() != outputs_.size()) {
    throw std::invalid_argument("dataset: inputs and outputs differ in length");
  }
  if (outputs_.empty()) {
    throw std::invalid_argument("dataset: no samples");
  }
  const auto dim = inputs_.front().size();
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (inputs_[i].size() != dim || dim == 0) {
      throw std::invalid_argument("dataset: ragged input dimensions at sample " +
                                  std::to_string(i + 1));
    }
    if (!all_finite(inputs_[i]) || !std::isfinite(outputs_[i])) {
      throw std::invalid_argument("dataset: non-finite value at sample " +
                                  std::to_string(i + 1));
    }
  }
}

Dataset Dataset::from_scalar(const std::vector<double>& inputs,
                             const std::vector<double>& outputs) {
  std::vector<Vector> xs;
  xs.reserve(inputs.size());
  for (double x : inputs) xs.push_back(Vector::Constant(1, x));
  return Dataset(std::move(xs), outputs);
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Vector> xs;
  std::vector<double> ys;
  for (auto i : indices) {
    if (i >= size()) throw std::out_of_range("dataset: subset index out of range");
    xs.push_back(inputs_[i]);
    ys.push_back(outputs_[i]);
  }
  return Dataset(std::move(xs), std::move(ys));
}

bool Dataset::operator==(const Dataset& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (outputs_[i] != other.outputs_[i]) return false;
    if (inputs_[i].size() != other.inputs_[i].size()) return false;
    if (inputs_[i] != other.inputs_[i]) return false;
  }
  return true;
}

void SplitSpec::validate(std::size_t source_size) const {
  if (train_indices.empty() || validation_indices.empty()) {
    throw std::invalid_argument("split: train and validation sets must be nonempty");
  }
  std::set<std::size_t> seen;
  auto check = [&](const std::vector<std::size_t>& idx, const char* name) {
    for (auto i : idx) {
      if (i >= source_size) {
        throw std::invalid_argument(std::string("split: ") + name + " index " +
                                    std::to_string(i + 1) + " out of range");
      }
      if (!seen.insert(i).second) {
        throw std::invalid_argument("split: index " + std::to_string(i + 1) +
                                    " appears more than once");
      }
    }
  };
  check(train_indices, "train");
  check(validation_indices, "validation");
}

SplitDatasets apply_split(const Dataset& source, const SplitSpec& split) {
  split.validate(source.size());
  return {source.subset(split.train_indices), source.subset(split.validation_indices)};
}

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(double horizon, int steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time grid: horizon must be positive");
  }
  if (steps < 2) {
    throw std::invalid_argument("time grid: need at least 2 steps");
  }
}

TimeGrid make_time_grid(double horizon, int steps) { return TimeGrid(horizon, steps); }

// ---------------------------------------------------------------------------
// Controls

double legendre_basis(int k, double t, double horizon) {
  const double x = 2.0 * t / horizon - 1.0;
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  // Bonnet recursion: (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
  for (int n = 1; n < k; ++n) {
    const double next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

ControlSignal::ControlSignal(TimeGrid grid, ControlRepresentation rep, Matrix coeffs,
                             double u_max)
    : grid_(grid), rep_(rep), coeffs_(std::move(coeffs)), u_max_(u_max) {
  if (!(u_max > 0.0)) throw std::invalid_argument("control: u_max must be positive");
  if (!coeffs_.allFinite()) throw std::invalid_argument("control: non-finite coefficient");
  if (coeffs_.rows() < 1) throw std::invalid_argument("control: dimension must be positive");
  if (rep_ == ControlRepresentation::Grid && coeffs_.cols() != grid_.num_nodes()) {
    throw std::invalid_argument("control: grid representation needs one column per node");
  }
  if (rep_ == ControlRepresentation::Basis && coeffs_.cols() < 1) {
    throw std::invalid_argument("control: basis representation needs N >= 1");
  }
}

ControlSignal ControlSignal::on_grid(const TimeGrid& grid, Matrix node_values, double u_max) {
  return ControlSignal(grid, ControlRepresentation::Grid, std::move(node_values), u_max);
}

ControlSignal ControlSignal::on_basis(const TimeGrid& grid, Matrix coefficients, double u_max) {
  return ControlSignal(grid, ControlRepresentation::Basis, std::move(coefficients), u_max);
}

ControlSignal ControlSignal::constant(const TimeGrid& grid, const Vector& value, double u_max,
                                      ControlRepresentation rep, int basis_size) {
  if (rep == ControlRepresentation::Grid) {
    Matrix m = value.replicate(1, grid.num_nodes());
    return on_grid(grid, std::move(m), u_max);
  }
  if (basis_size < 1) throw std::invalid_argument("control: basis size must be >= 1");
  Matrix m = Matrix::Zero(value.size(), basis_size);
  m.col(0) = value;
  return on_basis(grid, std::move(m), u_max);
}

Vector ControlSignal::eval(double t) const {
  const double T = grid_.horizon();
  if (!(t >= 0.0 && t <= T)) {
    std::ostringstream os;
    os << "control: time " << t << " outside [0, " << T << "]";
    throw std::out_of_range(os.str());
  }
  Vector out;
  if (rep_ == ControlRepresentation::Grid) {
    const int n = grid_.steps();
    int j = static_cast<int>(std::floor(t / grid_.dt()));
    j = std::clamp(j, 0, n - 1);
    const double s = std::clamp((t - grid_.node(j)) / grid_.dt(), 0.0, 1.0);
    if (s == 0.0) {
      out = coeffs_.col(j);
    } else if (s == 1.0) {
      out = coeffs_.col(j + 1);
    } else {
      // Exact for equal neighbours.
      out = coeffs_.col(j) + s * (coeffs_.col(j + 1) - coeffs_.col(j));
    }
  } else {
    out = Vector::Zero(coeffs_.rows());
    for (Eigen::Index k = 0; k < coeffs_.cols(); ++k) {
      out += coeffs_.col(k) * legendre_basis(static_cast<int>(k), t, T);
    }
  }
  return out.cwiseMax(-u_max_).cwiseMin(u_max_);
}

Matrix ControlSignal::sample_nodes() const {
  Matrix out(dim(), grid_.num_nodes());
  if (rep_ == ControlRepresentation::Grid) {
    out = coeffs_.cwiseMax(-u_max_).cwiseMin(u_max_);
    return out;
  }
  for (int j = 0; j < grid_.num_nodes(); ++j) out.col(j) = eval(grid_.node(j));
  return out;
}

ControlSignal ControlSignal::with_coefficients(Matrix coeffs) const {
  if (coeffs.rows() != coeffs_.rows() || coeffs.cols() != coeffs_.cols()) {
    throw std::invalid_argument("control: coefficient shape mismatch");
  }
  if (rep_ == ControlRepresentation::Grid) {
    coeffs = coeffs.cwiseMax(-u_max_).cwiseMin(u_max_);
  }
  return ControlSignal(grid_, rep_, std::move(coeffs), u_max_);
}

Vector eval_control(const ControlSignal& u, double t) { return u.eval(t); }

ControlPartition::ControlPartition(Vector leader_mask, Vector follower_mask)
    : leader_(std::move(leader_mask)), follower_(std::move(follower_mask)) {
  if (leader_.size() != follower_.size() || leader_.size() == 0) {
    throw std::invalid_argument("partition: masks must have equal, positive length");
  }
  for (Eigen::Index i = 0; i < leader_.size(); ++i) {
    const double a = leader_[i];
    const double b = follower_[i];
    if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0)) {
      throw std::invalid_argument("partition: masks must be binary");
    }
    if (a == 1.0 && b == 1.0) {
      throw std::invalid_argument("partition: masks overlap at coordinate " +
                                  std::to_string(i + 1));
    }
    if (a == 0.0 && b == 0.0) {
      throw std::invalid_argument("partition: coordinate " + std::to_string(i + 1) +
                                  " is owned by neither agent");
    }
  }
}

ControlPartition ControlPartition::from_leader(const std::vector<bool>& leader) {
  Vector l(static_cast<Eigen::Index>(leader.size()));
  for (std::size_t i = 0; i < leader.size(); ++i) l[static_cast<Eigen::Index>(i)] = leader[i] ? 1.0 : 0.0;
  Vector f = Vector::Ones(l.size()) - l;
  return ControlPartition(std::move(l), std::move(f));
}

Vector combine_controls(const ControlSignal& u1, const ControlSignal& u2,
                        const ControlPartition& part, double t) {
  if (u1.dim() != part.dim() || u2.dim() != part.dim()) {
    throw std::invalid_argument("combine_controls: dimension mismatch");
  }
  return u1.eval(t).cwiseProduct(part.leader_mask()) +
         u2.eval(t).cwiseProduct(part.follower_mask());
}

// ---------------------------------------------------------------------------
// SolverConfig

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  if (!(beta > 0.0)) fail("beta must be > 0");
  if (!(gamma1 >= 0.0 && gamma1 <= 1.0)) fail("gamma1 must lie in [0, 1]");
  if (!(gamma2 >= 0.0 && gamma2 <= 1.0)) fail("gamma2 must lie in [0, 1]");
  if (!(eps_tol > 0.0)) fail("eps_tol must be > 0");
  if (!(inner_tol > 0.0)) fail("inner_tol must be > 0");
  if (!(z >= 0.0)) fail("z must be >= 0");
  if (!(mu >= 0.0)) fail("mu must be >= 0");
  if (max_outer < 1) fail("max_outer must be >= 1");
  if (max_inner < 0) fail("max_inner must be >= 0");
  if (!(u_max > 0.0)) fail("u_max must be > 0");
  if (!(horizon > 0.0)) fail("T must be > 0");
  if (steps < 2) fail("N_t must be >= 2");
}

}  // namespace sflow
