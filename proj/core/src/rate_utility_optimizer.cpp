#include "volu/rate_utility_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "volu/errors.hpp"

namespace volu {
namespace {

// Relative tolerance for slope ties inside one tile.
constexpr double kRelEps = 1e-12;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kRelEps * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double TileChoice::cost(int m) const {
  if (m == buffered) return 0.0;
  return bit_count.at(static_cast<std::size_t>(m));
}

void TileChoice::validate() const {
  if (utility.empty() || utility.size() != bit_count.size()) {
    throw ValidationError("utility and bit_count must have M + 1 entries");
  }
  if (utility[0] != 0.0 || bit_count[0] != 0.0) {
    throw ValidationError("the null representation has zero utility and cost");
  }
  const int top = max_representation();
  if (buffered < 0 || buffered > top || n < buffered || n > top) {
    throw ValidationError("representation index out of range");
  }
  for (double b : bit_count) {
    if (b < 0.0) throw ValidationError("bit counts must be non-negative");
  }
}

int AllocationPlan::selection(const TileChoice& tile) const {
  const auto it = selections.find(tile.key);
  return it == selections.end() ? tile.buffered : it->second;
}

std::pair<double, int> max_lambda(const TileChoice& tile) {
  const double base_cost = tile.cost(tile.n);
  const double base_utility = tile.utility[static_cast<std::size_t>(tile.n)];
  double best = 0.0;
  int best_m = tile.n;
  bool found = false;
  for (int m = tile.buffered; m <= tile.max_representation(); ++m) {
    if (m == tile.n) continue;
    const double db = tile.cost(m) - base_cost;
    if (!(db > 0.0)) continue;
    const double slope =
        (tile.utility[static_cast<std::size_t>(m)] - base_utility) / db;
    // Iterating upward, so ">=" on a tie keeps the larger m.
    if (!found || slope > best || nearly_equal(slope, best)) {
      best = slope;
      best_m = m;
      found = true;
    }
  }
  if (!found || best <= 0.0) return {0.0, tile.n};
  return {best, best_m};
}

namespace {

struct QueueOrder {
  const std::vector<TileChoice>* tiles;
  bool operator()(std::size_t a, std::size_t b) const {
    const auto& ta = (*tiles)[a];
    const auto& tb = (*tiles)[b];
    if (ta.lambda_star != tb.lambda_star) return ta.lambda_star > tb.lambda_star;
    if (ta.key != tb.key) return ta.key < tb.key;
    return a < b;
  }
};

double total_utility_of(const std::vector<TileChoice>& tiles) {
  double sum = 0.0;
  for (const auto& t : tiles) sum += t.utility[static_cast<std::size_t>(t.n)];
  return sum;
}

}  // namespace

AllocationPlan greedy_allocate_in_place(std::vector<TileChoice>& tiles,
                                        double budget, BudgetMode mode) {
  if (budget < 0.0) throw DomainError("budget must be >= 0");
  for (auto& t : tiles) {
    t.validate();
    std::tie(t.lambda_star, t.m_star) = max_lambda(t);
  }

  std::set<std::size_t, QueueOrder> queue(QueueOrder{&tiles});
  for (std::size_t i = 0; i < tiles.size(); ++i) queue.insert(i);

  AllocationPlan plan;
  bool committed = false;
  double consumed = 0.0;
  while (consumed < budget && !queue.empty()) {
    const std::size_t idx = *queue.begin();
    TileChoice& tile = tiles[idx];
    if (tile.lambda_star <= 0.0) break;
    const double increment = tile.cost(tile.m_star) - tile.cost(tile.n);
    if (mode == BudgetMode::kStrict && consumed + increment > budget) break;

    queue.erase(queue.begin());
    consumed += increment;
    plan.final_lambda = tile.lambda_star;
    committed = true;
    tile.n = tile.m_star;
    plan.trace.push_back({tile.key, tile.lambda_star, tile.n, consumed});
    std::tie(tile.lambda_star, tile.m_star) = max_lambda(tile);
    queue.insert(idx);
  }
  if (!committed && !queue.empty()) {
    // Nothing fit: the threshold sits at the best outstanding slope.
    plan.final_lambda = std::max(0.0, tiles[*queue.begin()].lambda_star);
  }

  for (const auto& t : tiles) {
    if (t.n != t.buffered) {
      plan.selections[t.key] = t.n;
      plan.requested_bits += t.bit_count[static_cast<std::size_t>(t.n)];
    }
  }
  plan.total_utility = total_utility_of(tiles);
  return plan;
}

AllocationPlan greedy_allocate(const std::vector<TileChoice>& tiles,
                               double budget, BudgetMode mode) {
  std::vector<TileChoice> copy = tiles;
  return greedy_allocate_in_place(copy, budget, mode);
}

AllocationPlan brute_force_allocate(std::span<const TileChoice> tiles,
                                    double budget) {
  double combos = 1.0;
  for (const auto& t : tiles) {
    t.validate();
    combos *= static_cast<double>(t.max_representation() - t.buffered + 1);
    if (combos > kBruteForceLimit) {
      throw SizeError("brute-force search space exceeds the enumeration limit");
    }
  }

  const std::size_t k = tiles.size();
  std::vector<int> current(k);
  for (std::size_t i = 0; i < k; ++i) current[i] = tiles[i].buffered;
  std::vector<int> best = current;
  double best_utility = -std::numeric_limits<double>::infinity();

  // Odometer over selections in lexicographic order; strict improvement keeps
  // the lexicographically smallest optimum.
  while (true) {
    double bits = 0.0;
    double utility = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      bits += tiles[i].cost(current[i]);
      utility += tiles[i].utility[static_cast<std::size_t>(current[i])];
    }
    if (bits <= budget && utility > best_utility) {
      best_utility = utility;
      best = current;
    }
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (current[pos] < tiles[pos].max_representation()) {
        ++current[pos];
        break;
      }
      current[pos] = tiles[pos].buffered;
      if (pos == 0) {
        pos = k;  // wrapped around
        break;
      }
    }
    if (pos == k || k == 0) break;
  }

  AllocationPlan plan;
  plan.total_utility = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& t = tiles[i];
    plan.total_utility += t.utility[static_cast<std::size_t>(best[i])];
    if (best[i] != t.buffered) {
      plan.selections[t.key] = best[i];
      plan.requested_bits += t.bit_count[static_cast<std::size_t>(best[i])];
    }
  }
  return plan;
}

double lagrangian_value(std::span<const TileChoice> tiles,
                        std::span<const int> selections, double lambda) {
  if (tiles.size() != selections.size()) {
    throw ValidationError("one selection per tile is required");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const int m = selections[i];
    if (m < tiles[i].buffered || m > tiles[i].max_representation()) {
      throw ValidationError("selection below the buffered representation");
    }
    sum += tiles[i].utility[static_cast<std::size_t>(m)] -
           lambda * tiles[i].cost(m);
  }
  return sum;
}

std::vector<int> lagrangian_argmax(const TileChoice& tile, double lambda) {
  std::vector<double> values;
  double best = -std::numeric_limits<double>::infinity();
  for (int m = tile.buffered; m <= tile.max_representation(); ++m) {
    const double v =
        tile.utility[static_cast<std::size_t>(m)] - lambda * tile.cost(m);
    values.push_back(v);
    best = std::max(best, v);
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (nearly_equal(values[i], best)) {
      out.push_back(tile.buffered + static_cast<int>(i));
    }
  }
  return out;
}

std::vector<int> upper_hull(const TileChoice& tile) {
  std::vector<int> order;
  for (int m = tile.buffered; m <= tile.max_representation(); ++m) {
    order.push_back(m);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tile.cost(a) < tile.cost(b);
  });

  auto u = [&](int m) { return tile.utility[static_cast<std::size_t>(m)]; };
  std::vector<int> hull{tile.buffered};
  for (int m : order) {
    if (m == tile.buffered) continue;
    const double c = tile.cost(m);
    // Only strictly rising points can be reached while lambda > 0.
    if (u(m) <= u(hull.back())) continue;
    if (c == tile.cost(hull.back())) {
      hull.back() = m;
      continue;
    }
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      const double cross = (tile.cost(b) - tile.cost(a)) * (u(m) - u(a)) -
                           (u(b) - u(a)) * (c - tile.cost(a));
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(m);
  }
  return hull;
}

void write_trace_csv(std::ostream& out, const AllocationPlan& plan) {
  out << "step,object,segment,gof,morton,lambda,m,consumed_bits\n";
  std::size_t step = 0;
  for (const auto& s : plan.trace) {
    out << step++ << ',' << s.key.object << ',' << s.key.segment << ','
        << s.key.gof << ',' << s.key.morton << ',' << s.lambda << ',' << s.m
        << ',' << s.consumed_bits << '\n';
  }
}

}  // namespace volu
