#include "volu/charts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "volu/errors.hpp"
#include "volu/simulation.hpp"

namespace volu {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 300.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 34.0;
constexpr double kBottom = 44.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round tick spacing covering [lo, hi] with about five steps.
double tick_step(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string line_chart_svg(const ChartSpec& chart) {
  double y_min = 0.0;
  double y_max = 0.0;
  for (const auto& s : chart.series) {
    for (double v : s.y) {
      if (std::isfinite(v)) y_max = std::max(y_max, v);
      if (std::isfinite(v)) y_min = std::min(y_min, v);
    }
  }
  if (y_max <= y_min) y_max = y_min + 1.0;
  y_max += 0.05 * (y_max - y_min);
  const double x_min = chart.x_min;
  const double x_max = chart.x_max > x_min ? chart.x_max : x_min + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"13\">" << escape(chart.title)
      << "</text>\n";

  const double xs = tick_step(x_min, x_max);
  for (double x = std::ceil(x_min / xs) * xs; x <= x_max + 1e-9; x += xs) {
    out << "<line x1=\"" << px(x) << "\" y1=\"" << kTop << "\" x2=\"" << px(x)
        << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << px(x) << "\" y=\"" << kTop + plot_h + 14
        << "\" text-anchor=\"middle\">" << x << "</text>\n";
  }
  const double ys = tick_step(y_min, y_max);
  for (double y = std::ceil(y_min / ys) * ys; y <= y_max + 1e-9; y += ys) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << py(y) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << py(y) << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\">" << y << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << kTop + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.y[k])) continue;
      out << px(s.x[k]) << ',' << py(s.y[k]) << ' ';
    }
    out << "\"/>\n";
    const double ly = kTop + 12.0 + 16.0 * static_cast<double>(i);
    out << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\""
        << kLeft + plot_w + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 36 << "\" y=\"" << ly + 4 << "\">"
        << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_charts(const RunResult& result, const std::filesystem::path& dir) {
  const auto& rows = result.metrics;
  if (rows.empty()) return;
  std::filesystem::create_directories(dir);
  auto save = [&](const std::string& name, const ChartSpec& chart) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << line_chart_svg(chart);
  };

  std::vector<double> t;
  for (const auto& r : rows) t.push_back(r.t);
  const double x_max = t.back();

  ChartSpec occ{"Buffer occupancy", "time (s)", "seconds", 0.0, x_max, {}};
  ChartSeries occ_s{"occupancy", t, {}};
  for (const auto& r : rows) occ_s.y.push_back(r.occupancy);
  occ.series.push_back(std::move(occ_s));
  save("occupancy.svg", occ);

  ChartSpec bw{"Bandwidth", "time (s)", "Mbps", 0.0, x_max, {}};
  ChartSeries sel{"selected", t, {}};
  ChartSeries est{"estimated", t, {}};
  for (const auto& r : rows) {
    sel.y.push_back(r.selected_bandwidth_avg > 0.0 ? r.selected_bandwidth_avg / 1e6
                                                   : std::nan(""));
    est.y.push_back(r.est_throughput / 1e6);
  }
  bw.series.push_back(std::move(sel));
  bw.series.push_back(std::move(est));
  save("bandwidth.svg", bw);

  const std::size_t objects = rows.front().per_object_utility.size();
  bool any_utility = false;
  ChartSpec util{"Visible utility per object", "time (s)", "utility", 0.0, x_max, {}};
  for (std::size_t o = 0; o < objects; ++o) {
    ChartSeries s{"object " + std::to_string(o), t, {}};
    for (const auto& r : rows) {
      s.y.push_back(r.per_object_utility[o]);
      any_utility = any_utility || r.per_object_utility[o] > 0.0;
    }
    util.series.push_back(std::move(s));
  }
  if (any_utility) save("utility.svg", util);

  ChartSeries lat{"latency", {}, {}};
  for (const auto& r : rows) {
    if (r.response_latency < 0.0) continue;
    lat.x.push_back(r.t);
    lat.y.push_back(r.response_latency);
  }
  if (!lat.x.empty()) {
    ChartSpec chart{"Flip response latency", "time (s)", "seconds", 0.0, x_max, {}};
    chart.series.push_back(std::move(lat));
    save("latency.svg", chart);
  }
}

}  // namespace volu
