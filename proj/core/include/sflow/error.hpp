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

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hypothesis evaluated where its denominator vanishes.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, Eigen::VectorXd theta,
                   Eigen::VectorXd input)
      : Error(what), theta_(std::move(theta)), input_(std::move(input)) {}

  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::VectorXd& input() const { return input_; }

 private:
  Eigen::VectorXd theta_;
  Eigen::VectorXd input_;
};

/// A state or costate component became NaN or infinite during integration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what), time_(time) {}

  /// Grid time at which the non-finite value was detected.
  double time() const { return time_; }

 private:
  double time_;
};

/// Backtracking exhausted its halvings without decreasing the objective.
class NoProgressError : public Error {
 public:
  using Error::Error;
};

}  // namespace sflow
