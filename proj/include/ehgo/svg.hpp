#pragma once

#include <string>
#include <vector>

#include "ehgo/analysis.hpp"
#include "ehgo/sim.hpp"

namespace ehgo {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
  bool markers = false;  // draw points instead of a line
  std::string color = "#1f77b4";
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool equal_aspect = false;
  std::vector<std::string> notes;
  int width = 720;
  int height = 480;
  std::size_t max_points = 2000;  // longer series are decimated
};

/// Standalone SVG document. The root carries data-series="N" and every
/// series is one element with class="series".
std::string render_svg(const std::vector<Series>& series, const PlotOptions& options);

/// Top-down x-y paths: vehicle solid, multirotor dashed.
std::string trajectory_svg(const SimLog& log);
/// |rho1| and |xi1| against time on a log scale.
std::string errors_svg(const SimLog& log);
/// Steady estimation error against epsilon with the fitted line.
std::string sweep_svg(const SweepResult& sweep);

}  // namespace ehgo
