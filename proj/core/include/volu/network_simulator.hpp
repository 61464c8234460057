#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace volu {

struct RateEpoch {
  double start = 0.0;  // seconds
  double rate = 0.0;   // mean bits per second
};

// Piecewise-constant mean rate driving a Poisson packet process. With a
// positive cycle_length the schedule repeats; otherwise the last epoch lasts
// forever.
struct NetworkProfile {
  std::vector<RateEpoch> schedule{{0.0, 18e6}};
  double cycle_length = 0.0;
  double packet_size = 12000.0;  // bits
  std::uint64_t seed = 1;
  double rtt = 0.0;  // seconds added before the first packet of each request

  void validate() const;
  double rate_at(double t) const;
  // Mean bits deliverable in [t0, t1].
  double mean_bits(double t0, double t1) const;
};

// "stable" or "variable". Throws ConfigError otherwise.
NetworkProfile preset(const std::string& name);

// CSV rows of (t_start_s, mean_rate_bps); a non-numeric first row is treated
// as a header.
NetworkProfile load_network_trace(const std::filesystem::path& path);
NetworkProfile parse_network_trace(const std::string& csv);

struct TransferResult {
  double start = 0.0;
  double completion = 0.0;            // +inf when the link never delivers
  std::vector<double> mark_arrivals;  // one per requested cumulative mark
  std::size_t packets = 0;
};

// Simulates one serial transfer beginning at t_start. `cumulative_bits` must
// be non-decreasing; each mark is delivered with the packet that completes it.
// Packet arrivals depend only on (seed, t_start).
TransferResult simulate_transfer(const NetworkProfile& profile, double t_start,
                                 std::span<const double> cumulative_bits);

// Seconds needed to receive `bits` starting at t_start; +inf if never.
double download_time(double bits, double t_start, const NetworkProfile& profile);

}  // namespace volu
