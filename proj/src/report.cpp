#include "fxts/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fxts::report {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sweep_csv(const std::string& key_name, const std::vector<sweep::SweepRecord>& records,
                      bool key_is_umax) {
  std::ostringstream os;
  os << key_name << ",max_delta1,goal_entry_time,input_norm_max,diverged\n";
  for (const auto& rec : records) {
    double key = key_is_umax ? rec.point.u_max : rec.point.t_budget;
    os << format_number(key) << ',' << format_number(rec.max_delta1) << ','
       << (rec.goal_entry_time ? format_number(*rec.goal_entry_time) : "nan") << ','
       << format_number(rec.input_norm_max) << ',' << (rec.diverged ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const sim::Trajectory& trajectory) {
  std::ostringstream os;
  const int n = trajectory.states.empty() ? 0 : static_cast<int>(trajectory.states.front().size());
  const int m = trajectory.inputs.empty() ? 0 : static_cast<int>(trajectory.inputs.front().size());
  os << 't';
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= m; ++i) os << ",u" << i;
  os << ",delta1,h_G\n";
  for (size_t k = 0; k < trajectory.size(); ++k) {
    os << format_number(trajectory.times[k]);
    for (int i = 0; i < n; ++i) os << ',' << format_number(trajectory.states[k][i]);
    for (int i = 0; i < m; ++i) os << ',' << format_number(trajectory.inputs[k][i]);
    os << ',' << format_number(trajectory.delta1_values[k]) << ','
       << format_number(trajectory.h_values[k]) << '\n';
  }
  return os.str();
}

namespace {

struct Frame {
  double w = 640, h = 440;
  double left = 70, right = 30, top = 40, bottom = 55;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;

  double px(double x) const { return left + (x - x_lo) / (x_hi - x_lo) * (w - left - right); }
  double py(double y) const { return h - bottom - (y - y_lo) / (y_hi - y_lo) * (h - top - bottom); }
};

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    double c = lo;
    lo = c - 1.0;
    hi = c + 1.0;
    return;
  }
  double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void svg_open(std::ostringstream& os, double w, double h) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void text(std::ostringstream& os, double x, double y, const std::string& s,
          const std::string& anchor = "middle", int size = 12) {
  os << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"" << size
     << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

}  // namespace

std::string line_chart_svg(const Series& series, const std::string& x_label,
                           const std::string& y_label, const std::string& title) {
  if (series.x.size() != series.y.size() || series.x.empty()) {
    throw std::invalid_argument("series must be nonempty with matching sizes");
  }
  Frame f;
  f.x_lo = *std::min_element(series.x.begin(), series.x.end());
  f.x_hi = *std::max_element(series.x.begin(), series.x.end());
  std::vector<double> finite_y;
  for (double v : series.y) {
    if (std::isfinite(v)) finite_y.push_back(v);
  }
  if (finite_y.empty()) finite_y.push_back(0.0);
  f.y_lo = *std::min_element(finite_y.begin(), finite_y.end());
  f.y_hi = *std::max_element(finite_y.begin(), finite_y.end());
  pad_range(f.x_lo, f.x_hi);
  pad_range(f.y_lo, f.y_hi);

  std::ostringstream os;
  svg_open(os, f.w, f.h);
  text(os, f.w / 2, 22, title, "middle", 14);

  // axes
  os << "<line x1=\"" << f.left << "\" y1=\"" << f.h - f.bottom << "\" x2=\"" << f.w - f.right
     << "\" y2=\"" << f.h - f.bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\""
     << f.h - f.bottom << "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double xv = f.x_lo + (f.x_hi - f.x_lo) * i / ticks;
    double yv = f.y_lo + (f.y_hi - f.y_lo) * i / ticks;
    double px = f.px(xv);
    double py = f.py(yv);
    os << "<line x1=\"" << px << "\" y1=\"" << f.h - f.bottom << "\" x2=\"" << px << "\" y2=\""
       << f.h - f.bottom + 5 << "\" stroke=\"black\"/>\n";
    text(os, px, f.h - f.bottom + 20, fmt_tick(xv));
    os << "<line x1=\"" << f.left - 5 << "\" y1=\"" << py << "\" x2=\"" << f.left << "\" y2=\""
       << py << "\" stroke=\"black\"/>\n";
    text(os, f.left - 9, py + 4, fmt_tick(yv), "end");
  }
  text(os, (f.left + f.w - f.right) / 2, f.h - 12, x_label);
  os << "<g transform=\"translate(16," << (f.top + f.h - f.bottom) / 2 << ") rotate(-90)\">";
  text(os, 0, 0, y_label);
  os << "</g>\n";

  os << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < series.x.size(); ++i) {
    if (!std::isfinite(series.y[i])) continue;
    os << f.px(series.x[i]) << ',' << f.py(series.y[i]) << ' ';
  }
  os << "\"/>\n";
  for (size_t i = 0; i < series.x.size(); ++i) {
    if (!std::isfinite(series.y[i])) continue;
    os << "<circle cx=\"" << f.px(series.x[i]) << "\" cy=\"" << f.py(series.y[i])
       << "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string circles_svg(const std::vector<double>& radii, const std::vector<std::string>& labels,
                        const std::string& title) {
  if (radii.empty() || radii.size() != labels.size()) {
    throw std::invalid_argument("radii and labels must be nonempty with matching sizes");
  }
  const double w = 480, h = 500;
  const double cx = w / 2, cy = (h + 20) / 2;
  double r_max = *std::max_element(radii.begin(), radii.end());
  double span = std::max(r_max * 1.15, 1e-6);
  double scale = (w / 2 - 40) / span;

  std::ostringstream os;
  svg_open(os, w, h);
  text(os, w / 2, 22, title, "middle", 14);

  // axis cross
  os << "<line x1=\"" << cx - span * scale << "\" y1=\"" << cy << "\" x2=\"" << cx + span * scale
     << "\" y2=\"" << cy << "\" stroke=\"#999\"/>\n";
  os << "<line x1=\"" << cx << "\" y1=\"" << cy - span * scale << "\" x2=\"" << cx << "\" y2=\""
     << cy + span * scale << "\" stroke=\"#999\"/>\n";
  for (int s = -1; s <= 1; s += 2) {
    double v = s * span / 1.15;  // tick at +-r_max
    os << "<line x1=\"" << cx + v * scale << "\" y1=\"" << cy - 4 << "\" x2=\"" << cx + v * scale
       << "\" y2=\"" << cy + 4 << "\" stroke=\"#666\"/>\n";
    text(os, cx + v * scale, cy + 18, fmt_tick(v), "middle", 10);
  }

  const char* palette[] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8860b2", "#b8860b", "#3b9ea3"};
  for (size_t i = 0; i < radii.size(); ++i) {
    const char* color = palette[i % 6];
    os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << radii[i] * scale
       << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    text(os, cx + 6, cy - radii[i] * scale - 3, labels[i], "start", 10);
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace fxts::report
