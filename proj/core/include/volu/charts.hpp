#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace volu {

struct RunResult;

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label = "time (s)";
  std::string y_label;
  double x_min = 0.0;
  double x_max = 1.0;
  std::vector<ChartSeries> series;
};

// Standalone SVG line chart.
std::string line_chart_svg(const ChartSpec& chart);

// occupancy.svg, bandwidth.svg, utility.svg and, when flips were scripted,
// latency.svg. Panels without data are skipped.
void write_charts(const RunResult& result, const std::filesystem::path& dir);

}  // namespace volu
