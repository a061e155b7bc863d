#include "fricobs/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fricobs {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series, std::size_t max_points) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmax > xmin)) { xmin -= 1.0; xmax = xmin + 2.0; }
  if (!(ymax > ymin)) { ymin -= 1.0; ymax = ymin + 2.0; }
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto map_x = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  const auto map_y = [&](double y) {
    return kMarginTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h;
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_svg_chart: cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  // axes
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " << kHeight / 2
      << ")\">" << y_label << "</text>\n";
  // min/max tick labels
  out << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - kMarginBottom + 16
      << "\" font-size=\"11\">" << fmt(xmin) << "</text>\n";
  out << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kHeight - kMarginBottom + 16
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(xmax) << "</text>\n";
  out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kHeight - kMarginBottom
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymin) << "</text>\n";
  out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kMarginTop + 10
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymax) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
    const std::size_t n = s.x.size();
    const std::size_t stride = n > max_points ? n / max_points + 1 : 1;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << fmt(map_x(s.x[i])) << ',' << fmt(map_y(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kMarginLeft + 10 << "\" y=\"" << kMarginTop + 16 + 16 * si
        << "\" font-size=\"12\" fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write_svg_chart: write failed for " + path);
}

void emit_plots(const RunResult& result, const ScenarioConfig& cfg, const std::string& dir) {
  const RunSeries& s = result.series;
  {
    std::vector<PlotSeries> traces;
    if (cfg.mode == ScenarioMode::closed_loop_pid ||
        cfg.mode == ScenarioMode::closed_loop_pid_observer) {
      PlotSeries err{"tracking error [m]", s.t, {}};
      err.y.resize(s.size());
      for (std::size_t k = 0; k < s.size(); ++k)
        err.y[k] = cfg.reference.sample(s.t[k]).position - s.x_true[k];
      traces.push_back(std::move(err));
    } else {
      traces.push_back({"eps2 [m/s]", s.t, s.eps2});
      traces.push_back({"eps3 [N]", s.t, s.eps3});
    }
    write_svg_chart(dir + "/error_traces.svg", "Estimation / tracking error", "t [s]", "error",
                    traces);
  }
  if (cfg.mode == ScenarioMode::open_loop_observer ||
      cfg.mode == ScenarioMode::closed_loop_pid_observer) {
    // Friction-displacement loop: the filtered observer estimate against
    // the model-computed friction driven by the filtered velocity
    // estimate (the same low-pass is applied to all observed states).
    const double omega = 2.0 * std::numbers::pi * cfg.observer.omega_co_hz;
    LowPass2 vel_filter(omega, cfg.dt);
    FrictionParams fp = cfg.friction;
    PreslidingState replica{};
    double f_v = 0.0;
    PlotSeries observed{"observed", s.x_meas, s.f_est};
    PlotSeries model_f{"model f", s.x_meas, {}};
    PlotSeries model_fc{"model F_c", s.x_meas, {}};
    model_f.y.resize(s.size());
    model_fc.y.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double v = vel_filter.step(s.v_est[k]);
      replica = advance_presliding(fp, replica, v, cfg.dt);
      const double fc = coulomb_force(fp, replica, velocity_sign(fp, replica, v));
      f_v = viscous_step(fp, f_v, v, cfg.dt);
      model_fc.y[k] = fc;
      model_f.y[k] = total_friction(fc, f_v);
    }
    write_svg_chart(dir + "/friction_loop.svg", "Friction force over displacement", "x [m]",
                    "f [N]", {observed, model_f, model_fc});
  }
}

}  // namespace fricobs
