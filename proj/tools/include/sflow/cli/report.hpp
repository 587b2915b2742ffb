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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sflow/core.hpp"
#include "sflow/leader.hpp"
#include "sflow/models.hpp"

namespace sflow::cli {

/// ISO-8601 UTC time of the call, to the second.
std::string utc_timestamp();

/// Shortest decimal string that reads back to the same double.
std::string format_real(double v);

/// Opens `path` for writing and stores `text`. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

/// `t,theta_1..theta_p`, one row per grid node.
std::string trajectory_csv(const Trajectory& traj);

/// `t,u1_1..u1_p,u2_1..u2_p` sampled on the controls' grid.
std::string controls_csv(const ControlSignal& u1, const ControlSignal& u2);

/// Data points and the fitted curve at 200 samples over [min w, max w].
/// Needs scalar inputs.
std::string fit_plot_svg(const ModelSpec& model, const Vector& theta, const Dataset& data);

/// Residual y_i - h(x_i) against the experiment index 1..m.
std::string residuals_plot_svg(const std::vector<double>& residuals);

nlohmann::json history_json(const std::vector<IterationRecord>& history);

/// Report text: the JSON object with `generated_at` inserted, two-space
/// indentation and a trailing newline.
std::string report_text(nlohmann::json body, const std::string& generated_at);

}  // namespace sflow::cli
