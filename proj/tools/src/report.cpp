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

#include "sflow/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sflow/cli/config.hpp"

namespace sflow::cli {

namespace {

// Plot frame, in SVG user units.
constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

struct Axis {
  double lo;
  double hi;
};

Axis padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double d = std::max(1.0, std::abs(lo)) * 0.5;
    return {lo - d, hi + d};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

// Fixed precision keeps the files short and stable.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

class Frame {
 public:
  Frame(Axis x, Axis y) : x_(x), y_(y) {}
  double sx(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double sy(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void open(std::ostringstream& out, const std::string& title, const std::string& xlabel,
            const std::string& ylabel) const {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
        << px(kHeight) << "\" viewBox=\"0 0 " << px(kWidth) << ' ' << px(kHeight) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << px(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    out << "<g stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x1) << "\" y2=\"" << px(y0) << "\"/>\n";
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x0) << "\" y2=\"" << px(y1) << "\"/>\n";
    out << "</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out << "<line x1=\"" << px(sx(xv)) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(sx(xv)) << "\" y2=\""
          << px(y0 + 5) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << px(sx(xv)) << "\" y=\"" << px(y0 + 18) << "\" text-anchor=\"middle\">"
          << tick_label(xv) << "</text>\n";
      out << "<line x1=\"" << px(x0 - 5) << "\" y1=\"" << px(sy(yv)) << "\" x2=\"" << px(x0) << "\" y2=\""
          << px(sy(yv)) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(sy(yv) + 4) << "\" text-anchor=\"end\">"
          << tick_label(yv) << "</text>\n";
    }
    out << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(kHeight - 12) << "\" text-anchor=\"middle\">"
        << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << px((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << px((y0 + y1) / 2) << ")\">" << ylabel << "</text>\n";
    out << "</g>\n";
  }

 private:
  Axis x_;
  Axis y_;
};

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  const Eigen::Index p = traj.states.rows();
  for (Eigen::Index i = 0; i < p; ++i) out += ",theta_" + std::to_string(i + 1);
  out += '\n';
  for (int j = 0; j < traj.grid.num_nodes(); ++j) {
    out += format_real(traj.grid.node(j));
    for (Eigen::Index i = 0; i < p; ++i) out += ',' + format_real(traj.states(i, j));
    out += '\n';
  }
  return out;
}

std::string controls_csv(const ControlSignal& u1, const ControlSignal& u2) {
  const Matrix a = u1.sample_nodes();
  const Matrix b = u2.sample_nodes();
  const TimeGrid& grid = u1.grid();
  std::string out = "t";
  for (Eigen::Index i = 0; i < a.rows(); ++i) out += ",u1_" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < b.rows(); ++i) out += ",u2_" + std::to_string(i + 1);
  out += '\n';
  for (int j = 0; j < grid.num_nodes(); ++j) {
    out += format_real(grid.node(j));
    for (Eigen::Index i = 0; i < a.rows(); ++i) out += ',' + format_real(a(i, j));
    for (Eigen::Index i = 0; i < b.rows(); ++i) out += ',' + format_real(b(i, j));
    out += '\n';
  }
  return out;
}

std::string fit_plot_svg(const ModelSpec& model, const Vector& theta, const Dataset& data) {
  if (data.input_dim() != 1) throw std::invalid_argument("fit plot needs scalar inputs");
  double wmin = data.input(0)[0];
  double wmax = wmin;
  double vmin = data.output(0);
  double vmax = vmin;
  for (std::size_t i = 0; i < data.size(); ++i) {
    wmin = std::min(wmin, data.input(i)[0]);
    wmax = std::max(wmax, data.input(i)[0]);
    vmin = std::min(vmin, data.output(i));
    vmax = std::max(vmax, data.output(i));
  }
  constexpr int kSamples = 200;
  std::vector<double> cw(kSamples);
  std::vector<double> cv(kSamples);
  for (int k = 0; k < kSamples; ++k) {
    cw[k] = k == kSamples - 1 ? wmax : wmin + (wmax - wmin) * k / (kSamples - 1);
    Vector x(1);
    x[0] = cw[k];
    cv[k] = predict(model, theta, x);
    if (std::isfinite(cv[k])) {
      vmin = std::min(vmin, cv[k]);
      vmax = std::max(vmax, cv[k]);
    }
  }
  const Frame f(padded(wmin, wmax), padded(vmin, vmax));
  std::ostringstream out;
  f.open(out, "data and fitted model", "w", "v");
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (int k = 0; k < kSamples; ++k) {
    if (k) out << ' ';
    out << px(f.sx(cw[k])) << ',' << px(f.sy(cv[k]));
  }
  out << "\"/>\n<g fill=\"#d62728\">\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << "<circle cx=\"" << px(f.sx(data.input(i)[0])) << "\" cy=\"" << px(f.sy(data.output(i)))
        << "\" r=\"4\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string residuals_plot_svg(const std::vector<double>& residuals) {
  double lo = 0.0;
  double hi = 0.0;
  for (double r : residuals) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double m = static_cast<double>(residuals.size());
  const Frame f(padded(1.0, std::max(1.0, m)), padded(lo, hi));
  std::ostringstream out;
  f.open(out, "residuals", "experiment", "residual");
  out << "<line x1=\"" << px(f.sx(padded(1.0, std::max(1.0, m)).lo)) << "\" y1=\"" << px(f.sy(0.0))
      << "\" x2=\"" << px(kWidth - kRight) << "\" y2=\"" << px(f.sy(0.0))
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  out << "<g stroke=\"#2ca02c\" fill=\"#2ca02c\">\n";
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double x = f.sx(static_cast<double>(i + 1));
    out << "<line x1=\"" << px(x) << "\" y1=\"" << px(f.sy(0.0)) << "\" x2=\"" << px(x) << "\" y2=\""
        << px(f.sy(residuals[i])) << "\"/>\n";
    out << "<circle cx=\"" << px(x) << "\" cy=\"" << px(f.sy(residuals[i])) << "\" r=\"4\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

nlohmann::json history_json(const std::vector<IterationRecord>& history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : history) {
    out.push_back({{"iteration", r.iteration},
                   {"leader_grad_norm", r.leader_grad_norm},
                   {"follower_grad_norm", r.follower_grad_norm},
                   {"J1", r.J1},
                   {"J2", r.J2},
                   {"phi", r.phi},
                   {"leader_merit", r.leader_merit},
                   {"inner_iterations", r.inner_iterations},
                   {"leader_step", r.leader_step}});
  }
  return out;
}

std::string report_text(nlohmann::json body, const std::string& generated_at) {
  body["generated_at"] = generated_at;
  return body.dump(2) + "\n";
}

}  // namespace sflow::cli
