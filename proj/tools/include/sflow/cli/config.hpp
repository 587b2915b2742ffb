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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sflow/core.hpp"
#include "sflow/error.hpp"
#include "sflow/models.hpp"

namespace sflow::cli {

/// Malformed input file or configuration. `line` is 1-based; 0 when the
/// problem is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Output could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Everything a command needs, parsed from a flat `key = value` file.
struct RunConfig {
  ModelKind model = ModelKind::MichaelisMenten;
  std::filesystem::path data_path;
  std::vector<std::size_t> train;       // zero-based
  std::vector<std::size_t> validation;  // zero-based
  LossScale loss_scale = LossScale::Half;
  SolverConfig solver;
  Vector theta0;
  std::vector<bool> leader_mask;
  std::vector<bool> follower_mask;
  ControlRepresentation control = ControlRepresentation::Grid;
  int basis_size = 12;
  Vector u1_init;
  Vector u2_init;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 42;
  int gradcheck_directions = 20;
  double gradcheck_follower_tol = 1e-4;
  double gradcheck_leader_tol = 1e-3;
  /// Fault injection for the gradient checker; 1 means untouched.
  double gradcheck_corrupt = 1.0;

  /// Line on which each key was set, for error messages.
  std::map<std::string, int> key_lines;
};

/// Parses config text. Relative data/output paths are resolved against
/// `base_dir`. Throws ParseError naming the offending line.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

RunConfig load_config(const std::filesystem::path& path);

/// Reads a two-column CSV with header `w,v`. Throws ParseError naming the
/// row (1-based line number in the file).
Dataset ingest_csv(const std::filesystem::path& path);
Dataset parse_csv_text(const std::string& text);

/// Writes a dataset with a `w,v` header at round-trip precision.
void write_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace sflow::cli
