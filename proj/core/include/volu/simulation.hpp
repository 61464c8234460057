#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "volu/client_buffer_manager.hpp"
#include "volu/scenario.hpp"

namespace volu {

// One row per request opportunity.
struct MetricsRow {
  double t = 0.0;
  double est_throughput = 0.0;
  double selected_bandwidth_avg = 0.0;  // mean over tiles in this plan, 0 if idle
  double occupancy = 0.0;
  bool stall = false;
  double total_utility_visible = 0.0;
  std::vector<double> per_object_utility;
  // Mean representation over each object's window tiles after this plan's
  // selections, and whether the object center lies in the current view.
  std::vector<double> per_object_selected;
  std::vector<bool> per_object_visible;
  double response_latency = -1.0;  // < 0 when no flip was answered here
};

struct BufferTraceRow {
  double t = 0.0;
  std::size_t object = 0;
  double w_trail = 0.0;
  double w_lead = 0.0;
  double occupancy = 0.0;
  bool stall = false;
};

// Reaction to one scripted viewpoint flip.
struct FlipRecord {
  double flip_time = 0.0;
  double plan_time = -1.0;        // first request opportunity at or after the flip
  std::size_t newly_visible = 0;  // trail-edge tiles that turned visible
  std::size_t planned = 0;        // of those, upgraded by that plan
  double first_arrival = -1.0;
  double latency = -1.0;          // first_arrival - flip_time
};

struct PassStats {
  int pass = 0;
  double sum_n = 0.0;
  std::size_t tiles = 0;
  double average() const { return tiles ? sum_n / static_cast<double>(tiles) : 0.0; }
};

struct Summary {
  std::string algorithm;
  double startup_delay = 0.0;
  double avg_selected_bandwidth = 0.0;
  std::size_t stall_count = 0;
  double stall_seconds = 0.0;
  double avg_played_representation_visible = 0.0;
  std::vector<PassStats> passes;
  double total_delivered_utility = 0.0;
  double total_requested_utility = 0.0;
  double p95_response_latency = 0.0;
  std::size_t requests = 0;
  // Per object at the end of the run: share of window tiles holding n >= 1,
  // and whether the object is in view.
  std::vector<double> final_window_coverage;
  std::vector<bool> final_visible;
};

struct RunResult {
  Summary summary;
  std::vector<MetricsRow> metrics;
  std::vector<BufferTraceRow> buffer_trace;
  std::vector<RequestLogRow> requests;
  std::vector<FlipRecord> flips;
  std::string optimizer_trace;  // CSV, only when requested by the scenario
};

RunResult run(const Scenario& scenario);

void write_metrics_csv(std::ostream& out, const RunResult& result);
void write_buffer_trace_csv(std::ostream& out, const RunResult& result);
std::string summary_json(const RunResult& result);

// metrics.csv, summary.json, buffer_trace.csv, requests.csv, charts/*.svg and
// optimizer_trace.csv when recorded.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace volu
