#include "volu/network_simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "volu/errors.hpp"

namespace volu {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the epoch containing `local` (time within one schedule cycle).
std::size_t epoch_at(const std::vector<RateEpoch>& s, double local) {
  const auto it = std::upper_bound(
      s.begin(), s.end(), local,
      [](double t, const RateEpoch& e) { return t < e.start; });
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(
      0, std::distance(s.begin(), it) - 1));
}

class RateWalker {
 public:
  explicit RateWalker(const NetworkProfile& p) : p_(p) {
    any_positive_ = std::any_of(p.schedule.begin(), p.schedule.end(),
                                [](const RateEpoch& e) { return e.rate > 0.0; });
  }

  // Earliest t' >= t with integral of rate/packet_size over [t, t'] = work.
  double advance(double t, double work) const {
    if (!any_positive_) return kInf;
    while (true) {
      double rate = 0.0;
      double end = 0.0;
      segment(t, rate, end);
      const double cap = rate / p_.packet_size * (end - t);
      if (rate > 0.0 && cap >= work) return t + work * p_.packet_size / rate;
      if (std::isinf(end)) return kInf;
      work -= cap;
      t = end;
    }
  }

  // Rate at t and the absolute time where it next changes.
  void segment(double t, double& rate, double& end) const {
    const auto& s = p_.schedule;
    if (p_.cycle_length > 0.0) {
      const double cycles = std::floor(t / p_.cycle_length);
      const double base = cycles * p_.cycle_length;
      double local = t - base;
      if (local >= p_.cycle_length) local = 0.0;  // rounding at the boundary
      const std::size_t i = epoch_at(s, local);
      rate = s[i].rate;
      end = base + (i + 1 < s.size() ? s[i + 1].start : p_.cycle_length);
      if (end <= t) end = std::nextafter(t, kInf);
    } else {
      const std::size_t i = epoch_at(s, t);
      rate = s[i].rate;
      end = i + 1 < s.size() ? s[i + 1].start : kInf;
    }
  }

 private:
  const NetworkProfile& p_;
  bool any_positive_ = false;
};

}  // namespace

void NetworkProfile::validate() const {
  if (schedule.empty()) throw ValidationError("network schedule is empty");
  if (schedule.front().start != 0.0) {
    throw ValidationError("network schedule must start at t = 0");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i].rate < 0.0 || !std::isfinite(schedule[i].rate)) {
      throw ValidationError("network rates must be finite and >= 0");
    }
    if (i > 0 && !(schedule[i].start > schedule[i - 1].start)) {
      throw ValidationError("network schedule must be strictly increasing");
    }
  }
  if (!(packet_size > 0.0)) throw ValidationError("packet size must be > 0");
  if (cycle_length < 0.0) throw ValidationError("cycle length must be >= 0");
  if (cycle_length > 0.0 && schedule.back().start >= cycle_length) {
    throw ValidationError("schedule epochs must fit inside the cycle");
  }
  if (rtt < 0.0) throw ValidationError("rtt must be >= 0");
}

double NetworkProfile::rate_at(double t) const {
  double rate = 0.0;
  double end = 0.0;
  RateWalker(*this).segment(t, rate, end);
  return rate;
}

double NetworkProfile::mean_bits(double t0, double t1) const {
  RateWalker walker(*this);
  double bits = 0.0;
  double t = t0;
  while (t < t1) {
    double rate = 0.0;
    double end = 0.0;
    walker.segment(t, rate, end);
    const double stop = std::min(end, t1);
    bits += rate * (stop - t);
    t = stop;
  }
  return bits;
}

NetworkProfile preset(const std::string& name) {
  NetworkProfile p;
  if (name == "stable") {
    p.schedule = {{0.0, 18e6}};
  } else if (name == "variable") {
    p.schedule = {{0.0, 20e6}, {5.0, 6e6}, {10.0, 14e6}, {15.0, 3e6},
                  {20.0, 18e6}};
    p.cycle_length = 25.0;
  } else {
    throw ConfigError("unknown network preset '" + name + "'");
  }
  return p;
}

NetworkProfile parse_network_trace(const std::string& csv) {
  NetworkProfile p;
  p.schedule.clear();
  std::istringstream in(csv);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0;
    double rate = 0.0;
    if (!(row >> t >> rate)) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError("malformed network trace row: " + line);
    }
    first = false;
    p.schedule.push_back({t, rate});
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid network trace: ") + e.what());
  }
  return p;
}

NetworkProfile load_network_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open network trace " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_network_trace(buf.str());
}

TransferResult simulate_transfer(const NetworkProfile& profile, double t_start,
                                 std::span<const double> cumulative_bits) {
  TransferResult r;
  r.start = t_start;
  r.mark_arrivals.assign(cumulative_bits.size(), t_start);
  const double total = cumulative_bits.empty() ? 0.0 : cumulative_bits.back();
  if (total <= 0.0) {
    r.completion = t_start;
    return r;
  }

  const auto tbits = std::bit_cast<std::uint64_t>(t_start);
  std::seed_seq seq{static_cast<std::uint32_t>(profile.seed),
                    static_cast<std::uint32_t>(profile.seed >> 32),
                    static_cast<std::uint32_t>(tbits),
                    static_cast<std::uint32_t>(tbits >> 32)};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> gap(1.0);
  RateWalker walker(profile);

  double t = t_start + profile.rtt;
  std::size_t mark = 0;
  std::size_t packet = 0;
  while (mark < cumulative_bits.size()) {
    const double needed =
        std::ceil(cumulative_bits[mark] / profile.packet_size - 1e-12);
    if (static_cast<double>(packet) >= needed) {
      r.mark_arrivals[mark++] = packet == 0 ? t_start : t;
      continue;
    }
    t = walker.advance(t, gap(rng));
    ++packet;
    if (std::isinf(t)) {
      for (; mark < cumulative_bits.size(); ++mark) {
        r.mark_arrivals[mark] = kInf;
      }
      break;
    }
  }
  r.packets = packet;
  r.completion = r.mark_arrivals.back();
  return r;
}

double download_time(double bits, double t_start, const NetworkProfile& profile) {
  if (bits < 0.0) throw DomainError("bits must be >= 0");
  if (bits == 0.0) return 0.0;
  const double marks[] = {bits};
  return simulate_transfer(profile, t_start, marks).completion - t_start;
}

}  // namespace volu
