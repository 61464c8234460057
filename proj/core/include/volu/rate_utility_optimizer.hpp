#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "volu/tile_key.hpp"

namespace volu {

// Rate-utility points of one tile for the current request opportunity.
//
// `buffered` is the representation already held in the buffer when the cycle
// starts; fetching it again is free, so its effective cost is zero. `n` is the
// representation currently chosen for this cycle and moves up as the greedy
// sweep commits upgrades. Representations below `buffered` are never chosen.
struct TileChoice {
  TileKey key;
  std::vector<double> utility;    // m = 0..M, utility[0] = 0
  std::vector<double> bit_count;  // m = 0..M, bit_count[0] = 0
  int buffered = 0;
  int n = 0;
  double lambda_star = 0.0;
  int m_star = 0;

  int max_representation() const { return static_cast<int>(utility.size()) - 1; }
  // Bits this cycle would spend to end up holding representation m.
  double cost(int m) const;
  void validate() const;
};

enum class BudgetMode {
  // Check the budget before each commit; the last upgrade may overshoot.
  kOvershoot,
  // Stop as soon as the best upgrade no longer fits.
  kStrict,
};

struct TraceStep {
  TileKey key;
  double lambda = 0.0;
  int m = 0;
  double consumed_bits = 0.0;
};

struct AllocationPlan {
  std::map<TileKey, int> selections;  // only tiles with m != buffered
  double requested_bits = 0.0;
  double final_lambda = 0.0;
  double total_utility = 0.0;         // sum of U(m) over all tiles
  std::vector<TraceStep> trace;

  int selection(const TileChoice& tile) const;
};

// (lambda*, m*) for one tile from its current point (cost(n), U(n)).
std::pair<double, int> max_lambda(const TileChoice& tile);

// Greedy sweep over decreasing lambda. `tiles` is updated in place: each
// tile's n holds its final choice and (lambda_star, m_star) its next step.
AllocationPlan greedy_allocate_in_place(std::vector<TileChoice>& tiles,
                                        double budget,
                                        BudgetMode mode = BudgetMode::kOvershoot);
// Same sweep on a copy; the caller's tiles are left untouched.
AllocationPlan greedy_allocate(const std::vector<TileChoice>& tiles,
                               double budget,
                               BudgetMode mode = BudgetMode::kOvershoot);

inline constexpr double kBruteForceLimit = 1e7;

// Exhaustive optimum subject to the budget. Throws SizeError beyond
// kBruteForceLimit combinations.
AllocationPlan brute_force_allocate(std::span<const TileChoice> tiles,
                                    double budget);

// Sum over tiles of U(m) - lambda * cost(m). `selections` holds one m per tile.
double lagrangian_value(std::span<const TileChoice> tiles,
                        std::span<const int> selections, double lambda);

// Every m >= buffered maximizing U(m) - lambda * cost(m) for one tile.
std::vector<int> lagrangian_argmax(const TileChoice& tile, double lambda);

// Vertices of the upper convex hull of {(cost(m), U(m)) : m >= buffered},
// ascending in cost, starting at the buffered point.
std::vector<int> upper_hull(const TileChoice& tile);

void write_trace_csv(std::ostream& out, const AllocationPlan& plan);

}  // namespace volu
