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

#include "sflow/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sflow/error.hpp"

namespace sflow {

namespace {

void check_dims(const ModelSpec& model, const Vector& theta, const Vector& x) {
  if (theta.size() != model.dim) {
    throw std::invalid_argument("model: parameter dimension mismatch");
  }
  switch (model.kind) {
    case ModelKind::Linear:
      if (x.size() != model.dim) throw std::invalid_argument("model: input dimension mismatch");
      break;
    case ModelKind::MichaelisMenten:
    case ModelKind::Exponential:
      if (x.size() < 1) throw std::invalid_argument("model: empty input");
      break;
  }
}

double mm_denominator(const Vector& theta, const Vector& x) {
  const double d = theta[1] + x[0];
  if (!(std::abs(d) > kSingularityGuard)) {
    std::ostringstream os;
    os << "michaelis-menten: denominator theta1 + w = " << d << " is singular (theta = ("
       << theta[0] << ", " << theta[1] << "), w = " << x[0] << ")";
    throw SingularityError(os.str(), theta, x);
  }
  return d;
}

// Chain-rule factor dl/dyhat.
double loss_slope(double residual, LossScale scale) {
  return scale == LossScale::Half ? residual : 2.0 * residual;
}

}  // namespace

double predict(const ModelSpec& model, const Vector& theta, const Vector& x) {
  check_dims(model, theta, x);
  switch (model.kind) {
    case ModelKind::MichaelisMenten:
      return theta[0] * x[0] / mm_denominator(theta, x);
    case ModelKind::Linear:
      return theta.dot(x);
    case ModelKind::Exponential:
      return theta[0] * std::exp(theta[1] * x[0]);
  }
  return 0.0;
}

Vector predict_gradient(const ModelSpec& model, const Vector& theta, const Vector& x) {
  check_dims(model, theta, x);
  Vector g(model.dim);
  switch (model.kind) {
    case ModelKind::MichaelisMenten: {
      const double d = mm_denominator(theta, x);
      g[0] = x[0] / d;
      g[1] = -theta[0] * x[0] / (d * d);
      break;
    }
    case ModelKind::Linear:
      g = x;
      break;
    case ModelKind::Exponential: {
      const double e = std::exp(theta[1] * x[0]);
      g[0] = e;
      g[1] = theta[0] * x[0] * e;
      break;
    }
  }
  return g;
}

double loss(double prediction, double target, LossScale scale) {
  const double r = prediction - target;
  return scale == LossScale::Half ? 0.5 * r * r : r * r;
}

Objective::Objective(ModelSpec model, Dataset data, LossScale scale)
    : model_(model), data_(std::move(data)), scale_(scale) {
  if (data_.size() == 0) throw std::invalid_argument("objective: empty dataset");
  if (model_.kind == ModelKind::Linear && data_.input_dim() != model_.dim) {
    throw std::invalid_argument("objective: linear model dimension differs from input dimension");
  }
}

double Objective::value(const Vector& theta) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    sum += loss(predict(model_, theta, data_.input(i)), data_.output(i), scale_);
  }
  return sum / static_cast<double>(data_.size());
}

Vector Objective::gradient(const Vector& theta) const {
  if (theta.size() != model_.dim) {
    throw std::invalid_argument("objective: parameter dimension mismatch");
  }
  Vector g = Vector::Zero(model_.dim);
  const auto m = static_cast<double>(data_.size());
  if (model_.kind == ModelKind::MichaelisMenten) {
    // Hot path of every sweep; avoid a temporary per sample.
    double g0 = 0.0;
    double g1 = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const Vector& x = data_.input(i);
      const double d = mm_denominator(theta, x);
      const double w = x[0];
      const double slope = loss_slope(theta[0] * w / d - data_.output(i), scale_);
      g0 += slope * w / d;
      g1 -= slope * theta[0] * w / (d * d);
    }
    g[0] = g0 / m;
    g[1] = g1 / m;
    return g;
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const Vector& x = data_.input(i);
    const double r = predict(model_, theta, x) - data_.output(i);
    g += loss_slope(r, scale_) * predict_gradient(model_, theta, x);
  }
  return g / m;
}

Vector Objective::hvp(const Vector& theta, const Vector& v) const {
  if (v.size() != model_.dim) throw std::invalid_argument("objective: hvp direction dimension mismatch");
  const double norm = v.norm();
  if (norm == 0.0) return Vector::Zero(model_.dim);
  const double h = kHvpStep / (1.0 + norm);
  return (gradient(theta + h * v) - gradient(theta - h * v)) / (2.0 * h);
}

double validation_phi(const ModelSpec& model, const Vector& theta, const Dataset& validation,
                      LossScale scale) {
  return Objective(model, validation, scale).value(theta);
}

Vector validation_phi_grad(const ModelSpec& model, const Vector& theta,
                           const Dataset& validation, LossScale scale) {
  return Objective(model, validation, scale).gradient(theta);
}

}  // namespace sflow
