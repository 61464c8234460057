#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "volu/rate_utility_optimizer.hpp"

namespace volu::fixtures {

// Tile whose points (from the buffered point onward, with the buffered point
// moved to zero cost) form their own upper convex hull. Utilities, bit counts
// and slopes are integers, so every sum and comparison is exact in doubles.
inline TileChoice hull_tile(std::mt19937& rng, std::uint32_t id, int max_m,
                            bool allow_buffered) {
  std::uniform_int_distribution<int> reps(1, max_m);
  const int m_count = reps(rng);
  std::uniform_int_distribution<int> buf(0, allow_buffered ? m_count : 0);
  const int buffered = buf(rng);

  TileChoice t;
  t.key = TileKey{0, 0, 0, id};
  t.utility.assign(static_cast<std::size_t>(m_count + 1), 0.0);
  t.bit_count.assign(static_cast<std::size_t>(m_count + 1), 0.0);

  // Points below the buffered one: increasing, otherwise arbitrary.
  std::uniform_int_distribution<int> step(1, 20);
  double u = 0.0;
  double b = 0.0;
  for (int m = 1; m <= buffered; ++m) {
    u += step(rng);
    b += step(rng);
    t.utility[static_cast<std::size_t>(m)] = u;
    t.bit_count[static_cast<std::size_t>(m)] = b;
  }
  // Above it: strictly decreasing integer slopes from the zero-cost origin.
  std::vector<int> slopes;
  std::uniform_int_distribution<int> slope(1, 60);
  for (int m = buffered + 1; m <= m_count; ++m) slopes.push_back(slope(rng));
  std::sort(slopes.begin(), slopes.end(), std::greater<>());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
  const int top = buffered + static_cast<int>(slopes.size());
  t.utility.resize(static_cast<std::size_t>(top + 1));
  t.bit_count.resize(static_cast<std::size_t>(top + 1));
  // cost(m) = bit_count[m] for every m above the buffered rung.
  double cost = 0.0;
  for (int m = buffered + 1; m <= top; ++m) {
    const int db = step(rng);
    cost += db;
    u += static_cast<double>(slopes[static_cast<std::size_t>(m - buffered - 1)]) * db;
    t.utility[static_cast<std::size_t>(m)] = u;
    t.bit_count[static_cast<std::size_t>(m)] = cost;
  }
  t.buffered = buffered;
  t.n = buffered;
  return t;
}

// Arbitrary non-decreasing points, not necessarily concave.
inline TileChoice random_tile(std::mt19937& rng, std::uint32_t id, int max_m,
                              bool allow_buffered) {
  std::uniform_int_distribution<int> reps(1, max_m);
  const int m_count = reps(rng);
  std::uniform_real_distribution<double> inc(0.0, 1.0);
  TileChoice t;
  t.key = TileKey{0, 0, 0, id};
  t.utility.assign(static_cast<std::size_t>(m_count + 1), 0.0);
  t.bit_count.assign(static_cast<std::size_t>(m_count + 1), 0.0);
  for (int m = 1; m <= m_count; ++m) {
    t.utility[static_cast<std::size_t>(m)] = t.utility[static_cast<std::size_t>(m - 1)] + inc(rng);
    t.bit_count[static_cast<std::size_t>(m)] =
        t.bit_count[static_cast<std::size_t>(m - 1)] + 1.0 + 100.0 * inc(rng);
  }
  std::uniform_int_distribution<int> buf(0, allow_buffered ? m_count : 0);
  t.buffered = buf(rng);
  t.n = t.buffered;
  return t;
}

inline double max_total_cost(const std::vector<TileChoice>& tiles) {
  double sum = 0.0;
  for (const auto& t : tiles) {
    double best = 0.0;
    for (int m = t.buffered; m <= t.max_representation(); ++m) best = std::max(best, t.cost(m));
    sum += best;
  }
  return sum;
}

}  // namespace volu::fixtures
