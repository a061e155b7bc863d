#pragma once

#include <string>
#include <vector>

#include "fricobs/scenario.hpp"

namespace fricobs {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes a labeled multi-series line chart as a standalone SVG file.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series, std::size_t max_points = 4000);

/// Emits the standard plot set for a run into `dir`: error traces over
/// time and, when an observer ran, the friction-displacement loop with
/// the observed estimate against the model-computed f and F_c curves.
void emit_plots(const RunResult& result, const ScenarioConfig& cfg, const std::string& dir);

}  // namespace fricobs
