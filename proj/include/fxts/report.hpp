#pragma once

#include "fxts/sim.hpp"
#include "fxts/sweep.hpp"

#include <string>
#include <vector>

namespace fxts::report {

// 12 significant digits, the project-wide CSV number format.
std::string format_number(double v);

// header key,max_delta1,goal_entry_time,input_norm_max,diverged; one row per
// record, missing entry times written as nan, newline-terminated.
std::string sweep_csv(const std::string& key_name, const std::vector<sweep::SweepRecord>& records,
                      bool key_is_umax);

// columns t, x1..xn, u1..um, delta1, h_G
std::string trajectory_csv(const sim::Trajectory& trajectory);

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained line chart (inline styling, generic font family).
std::string line_chart_svg(const Series& series, const std::string& x_label,
                           const std::string& y_label, const std::string& title);

// Concentric domain boundaries (circles of the given radii) on an
// equal-aspect grid, one label per radius.
std::string circles_svg(const std::vector<double>& radii, const std::vector<std::string>& labels,
                        const std::string& title);

void write_file(const std::string& path, const std::string& contents);

}  // namespace fxts::report
