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

#include "sflow/core.hpp"

namespace sflow {

enum class ModelKind { MichaelisMenten, Linear, Exponential };

/// Quadratic loss with either 1/2 or unit scale.
enum class LossScale { Half, One };

/// Hypothesis h_theta. MichaelisMenten: theta0 * w / (theta1 + w), p = 2.
/// Linear: <theta, x>, p = dim x. Exponential: theta0 * exp(theta1 * w), p = 2.
struct ModelSpec {
  ModelKind kind = ModelKind::MichaelisMenten;
  Eigen::Index dim = 2;

  static ModelSpec michaelis_menten() { return {ModelKind::MichaelisMenten, 2}; }
  static ModelSpec linear(Eigen::Index p) { return {ModelKind::Linear, p}; }
  static ModelSpec exponential() { return {ModelKind::Exponential, 2}; }
};

/// |theta1 + w| at or below this raises SingularityError.
inline constexpr double kSingularityGuard = 1e-9;

/// Base step of the finite-difference Hessian-vector product.
inline constexpr double kHvpStep = 1e-5;

double predict(const ModelSpec& model, const Vector& theta, const Vector& x);

/// d h_theta(x) / d theta.
Vector predict_gradient(const ModelSpec& model, const Vector& theta, const Vector& x);

double loss(double prediction, double target, LossScale scale);

/// Mean loss of a model over a dataset, J(theta) = (1/m) sum l(h_theta(x_i), y_i).
/// Used both as the training objective and as the validation functional.
class Objective {
 public:
  Objective(ModelSpec model, Dataset data, LossScale scale = LossScale::Half);

  const ModelSpec& model() const { return model_; }
  const Dataset& data() const { return data_; }
  LossScale scale() const { return scale_; }
  Eigen::Index dim() const { return model_.dim; }

  double value(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;

  /// Hessian-vector product by central differences of the analytic gradient
  /// with step kHvpStep / (1 + |v|). Exactly zero for v = 0.
  Vector hvp(const Vector& theta, const Vector& v) const;

 private:
  ModelSpec model_;
  Dataset data_;
  LossScale scale_;
};

inline double objective_value(const Objective& obj, const Vector& theta) {
  return obj.value(theta);
}
inline Vector objective_gradient(const Objective& obj, const Vector& theta) {
  return obj.gradient(theta);
}
inline Vector objective_hvp(const Objective& obj, const Vector& theta, const Vector& v) {
  return obj.hvp(theta, v);
}

/// Validation functional Phi: mean loss over the validation samples.
double validation_phi(const ModelSpec& model, const Vector& theta, const Dataset& validation,
                      LossScale scale = LossScale::Half);
Vector validation_phi_grad(const ModelSpec& model, const Vector& theta,
                           const Dataset& validation, LossScale scale = LossScale::Half);

}  // namespace sflow
