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

#include <iosfwd>
#include <string>
#include <vector>

#include "sflow/cli/config.hpp"
#include "sflow/sflow.hpp"

namespace sflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitGradcheck = 4;

const char* version_string();

/// Everything derived from a RunConfig before any computation.
struct Setup {
  RunConfig config;
  Dataset data;
  SplitDatasets split;
  ModelSpec model;
  Objective objective;
  Objective validation;
  ControlPartition partition;
  TimeGrid grid;
  ControlSignal u1_init;
  ControlSignal u2_init;
};

/// Loads the dataset and builds problem objects. Throws ParseError for
/// anything inconsistent with the data (bad split, dimension mismatch).
Setup make_setup(const RunConfig& config);

/// Commands. Each writes into config.output_dir and returns an exit code;
/// errors are reported on `err` and mapped to the codes above.
int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_gradcheck(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sflow::cli
