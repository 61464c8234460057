#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "optimizer_fixtures.hpp"
#include "volu/errors.hpp"
#include "volu/rate_utility_optimizer.hpp"

namespace volu {
namespace {

TileChoice make_tile(std::uint32_t id, std::vector<double> u, std::vector<double> b,
                     int buffered = 0) {
  TileChoice t;
  t.key = TileKey{0, 0, 0, id};
  t.utility = std::move(u);
  t.bit_count = std::move(b);
  t.buffered = buffered;
  t.n = buffered;
  return t;
}

std::vector<TileChoice> ab_instance() {
  return {make_tile(0, {0, 0.5, 0.8}, {0, 10, 20}),
          make_tile(1, {0, 0.3, 0.4}, {0, 10, 20})};
}

TEST(MaxLambda, Examples) {
  TileChoice t = make_tile(0, {0, 0.5, 0.8}, {0, 10, 20});
  auto [l0, m0] = max_lambda(t);
  EXPECT_DOUBLE_EQ(l0, 0.05);
  EXPECT_EQ(m0, 1);
  t.n = 1;
  auto [l1, m1] = max_lambda(t);
  EXPECT_NEAR(l1, 0.03, 1e-15);
  EXPECT_EQ(m1, 2);
  t.n = 2;
  auto [l2, m2] = max_lambda(t);
  EXPECT_EQ(l2, 0.0);
  EXPECT_EQ(m2, 2);
}

TEST(MaxLambda, SlopeTiesGoToTheLargerRepresentation) {
  const TileChoice t = make_tile(0, {0, 1, 2, 2.5}, {0, 10, 20, 40});
  const auto [l, m] = max_lambda(t);
  EXPECT_DOUBLE_EQ(l, 0.1);
  EXPECT_EQ(m, 2);
}

TEST(MaxLambda, BufferedRepresentationCostsNothing) {
  // Holding rung 1 makes its cost zero, so the step to rung 2 pays 20 bits.
  const TileChoice t = make_tile(0, {0, 0.5, 0.8}, {0, 10, 20}, 1);
  EXPECT_EQ(t.cost(1), 0.0);
  const auto [l, m] = max_lambda(t);
  EXPECT_NEAR(l, 0.3 / 20.0, 1e-15);
  EXPECT_EQ(m, 2);
}

TEST(Greedy, HandTraceBudget30) {
  const auto tiles = ab_instance();
  const AllocationPlan plan = greedy_allocate(tiles, 30.0);
  EXPECT_EQ(plan.selection(tiles[0]), 2);
  EXPECT_EQ(plan.selection(tiles[1]), 1);
  EXPECT_EQ(plan.requested_bits, 30.0);
  EXPECT_NEAR(plan.total_utility, 1.1, 1e-12);
  ASSERT_EQ(plan.trace.size(), 3u);
  EXPECT_EQ(plan.trace[0].key.morton, 0u);
  EXPECT_EQ(plan.trace[0].m, 1);
}

TEST(Greedy, ZeroBudgetMakesNoUpgrades) {
  const AllocationPlan plan = greedy_allocate(ab_instance(), 0.0);
  EXPECT_TRUE(plan.selections.empty());
  EXPECT_EQ(plan.requested_bits, 0.0);
}

TEST(Greedy, LastUpgradeMayOvershoot) {
  const auto tiles = ab_instance();
  const AllocationPlan plan = greedy_allocate(tiles, 15.0);
  EXPECT_EQ(plan.selection(tiles[0]), 2);
  EXPECT_EQ(plan.selection(tiles[1]), 0);
  EXPECT_EQ(plan.requested_bits, 20.0);

  const AllocationPlan strict = greedy_allocate(tiles, 15.0, BudgetMode::kStrict);
  EXPECT_EQ(strict.selection(tiles[0]), 1);
  EXPECT_EQ(strict.requested_bits, 10.0);
}

TEST(Greedy, EmptyTileListAndNegativeBudget) {
  const std::vector<TileChoice> none;
  const AllocationPlan plan = greedy_allocate(none, 100.0);
  EXPECT_TRUE(plan.selections.empty());
  EXPECT_THROW(greedy_allocate(ab_instance(), -1.0), DomainError);
}

TEST(Greedy, RequestedBitsCountOnlyChangedTiles) {
  std::vector<TileChoice> tiles = ab_instance();
  tiles[1].buffered = 1;
  tiles[1].n = 1;
  const AllocationPlan plan = greedy_allocate(tiles, 10.0);
  for (const auto& [key, m] : plan.selections) {
    const auto& t = tiles[key.morton];
    EXPECT_NE(m, t.buffered);
  }
  double expected = 0.0;
  for (const auto& t : tiles) {
    const int m = plan.selection(t);
    if (m != t.buffered) expected += t.bit_count[static_cast<std::size_t>(m)];
  }
  EXPECT_EQ(plan.requested_bits, expected);
}

TEST(BruteForce, Examples) {
  const auto tiles = ab_instance();
  EXPECT_NEAR(brute_force_allocate(tiles, 30.0).total_utility, 1.1, 1e-12);
  const AllocationPlan ten = brute_force_allocate(tiles, 10.0);
  EXPECT_NEAR(ten.total_utility, 0.5, 1e-12);
  EXPECT_EQ(ten.selection(tiles[0]), 1);
  EXPECT_NEAR(brute_force_allocate(tiles, 40.0).total_utility, 1.2, 1e-12);
}

TEST(BruteForce, RefusesHugeInstances) {
  std::vector<TileChoice> tiles;
  for (std::uint32_t i = 0; i < 10; ++i) {
    tiles.push_back(make_tile(i, {0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5}));
  }
  EXPECT_THROW(brute_force_allocate(tiles, 10.0), SizeError);
}

TEST(Lagrangian, Examples) {
  const auto tiles = ab_instance();
  const std::vector<int> top{2, 2};
  EXPECT_NEAR(lagrangian_value(tiles, top, 0.0), 1.2, 1e-12);
  const std::vector<int> none{0, 0};
  EXPECT_EQ(lagrangian_value(tiles, none, 1e9), 0.0);

  EXPECT_EQ(lagrangian_argmax(tiles[0], 0.03), (std::vector<int>{1, 2}));
  EXPECT_EQ(lagrangian_argmax(tiles[1], 0.03), (std::vector<int>{0, 1}));
}

// Independent hull oracle: the vertices reached by the argmax of
// U(m) - lambda * cost(m) as lambda sweeps every interval between critical
// slopes, largest cost on ties.
std::vector<int> swept_vertices(const TileChoice& t) {
  std::vector<double> critical{0.0};
  for (int a = t.buffered; a <= t.max_representation(); ++a) {
    for (int b = t.buffered; b <= t.max_representation(); ++b) {
      const double dc = t.cost(b) - t.cost(a);
      if (dc > 0.0) {
        const double s = (t.utility[static_cast<std::size_t>(b)] -
                          t.utility[static_cast<std::size_t>(a)]) / dc;
        if (s > 0.0) critical.push_back(s);
      }
    }
  }
  std::sort(critical.begin(), critical.end());
  critical.erase(std::unique(critical.begin(), critical.end()), critical.end());
  std::vector<double> probes{critical.back() * 2.0 + 1.0};
  for (std::size_t i = critical.size(); i-- > 1;) {
    probes.push_back(0.5 * (critical[i] + critical[i - 1]));
  }
  std::vector<int> visited;
  for (double lambda : probes) {
    int best = t.buffered;
    double best_v = -1e300;
    for (int m = t.buffered; m <= t.max_representation(); ++m) {
      const double v = t.utility[static_cast<std::size_t>(m)] - lambda * t.cost(m);
      if (v > best_v) {
        best_v = v;
        best = m;
      }
    }
    if (visited.empty() || visited.back() != best) visited.push_back(best);
  }
  return visited;
}

TEST(Hull, SweepVisitsHullVerticesInCostOrder) {
  std::mt19937 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const TileChoice t = fixtures::random_tile(rng, 0, 6, true);
    const auto hull = upper_hull(t);
    EXPECT_EQ(hull, swept_vertices(t)) << "instance " << i;
    for (std::size_t k = 1; k < hull.size(); ++k) {
      EXPECT_LT(t.cost(hull[k - 1]), t.cost(hull[k]));
    }
  }
}

TEST(Hull, GreedyWalkFollowsTheHull) {
  std::mt19937 rng(22);
  for (int i = 0; i < 1000; ++i) {
    TileChoice t = fixtures::random_tile(rng, 0, 6, true);
    const auto hull = upper_hull(t);
    std::vector<int> walk{t.n};
    while (true) {
      const auto [l, m] = max_lambda(t);
      if (l <= 0.0) break;
      t.n = m;
      walk.push_back(m);
    }
    EXPECT_EQ(walk, hull) << "instance " << i;
  }
}

struct Replay {
  std::vector<int> selection;
  double utility = 0.0;
};

// Every prefix of the greedy trace is optimal for its own consumed rate.
TEST(Greedy, EveryPrefixMatchesBruteForceOnHullInstances) {
  std::mt19937 rng(2024);
  for (int inst = 0; inst < 300; ++inst) {
    std::uniform_int_distribution<int> kdist(1, 5);
    const int k = kdist(rng);
    std::vector<TileChoice> tiles;
    for (int i = 0; i < k; ++i) {
      tiles.push_back(fixtures::hull_tile(rng, static_cast<std::uint32_t>(i), 4, true));
    }
    const double budget = fixtures::max_total_cost(tiles) + 1.0;
    const AllocationPlan plan = greedy_allocate(tiles, budget, BudgetMode::kStrict);

    std::vector<int> sel;
    double utility = 0.0;
    for (const auto& t : tiles) {
      sel.push_back(t.buffered);
      utility += t.utility[static_cast<std::size_t>(t.buffered)];
    }
    for (const auto& step : plan.trace) {
      const auto& t = tiles[step.key.morton];
      auto& cur = sel[step.key.morton];
      utility += t.utility[static_cast<std::size_t>(step.m)] -
                 t.utility[static_cast<std::size_t>(cur)];
      cur = step.m;
      const AllocationPlan oracle = brute_force_allocate(tiles, step.consumed_bits);
      ASSERT_EQ(utility, oracle.total_utility) << "instance " << inst;
    }
  }
}

TEST(Greedy, StrictModeMatchesBruteForceAtConsumedRate) {
  std::mt19937 rng(99);
  for (int inst = 0; inst < 500; ++inst) {
    std::uniform_int_distribution<int> kdist(1, 6);
    const int k = kdist(rng);
    std::vector<TileChoice> tiles;
    for (int i = 0; i < k; ++i) {
      tiles.push_back(fixtures::hull_tile(rng, static_cast<std::uint32_t>(i), 5, inst % 2 == 1));
    }
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const double budget = std::floor(frac(rng) * fixtures::max_total_cost(tiles));
    const AllocationPlan plan = greedy_allocate(tiles, budget, BudgetMode::kStrict);
    ASSERT_LE(plan.requested_bits, budget);
    const AllocationPlan oracle = brute_force_allocate(tiles, plan.requested_bits);
    ASSERT_EQ(plan.total_utility, oracle.total_utility) << "instance " << inst;
  }
}

TEST(Greedy, LagrangianOptimalityAtFinalLambda) {
  std::mt19937 rng(7);
  for (int inst = 0; inst < 1000; ++inst) {
    std::uniform_int_distribution<int> kdist(1, 8);
    const int k = kdist(rng);
    std::vector<TileChoice> tiles;
    for (int i = 0; i < k; ++i) {
      tiles.push_back(fixtures::random_tile(rng, static_cast<std::uint32_t>(i), 5, true));
    }
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const double budget = frac(rng) * fixtures::max_total_cost(tiles);
    for (BudgetMode mode : {BudgetMode::kStrict, BudgetMode::kOvershoot}) {
      const AllocationPlan plan = greedy_allocate(tiles, budget, mode);
      for (const auto& t : tiles) {
        const auto best = lagrangian_argmax(t, plan.final_lambda);
        const int m = plan.selection(t);
        ASSERT_TRUE(std::find(best.begin(), best.end(), m) != best.end())
            << "instance " << inst << " tile " << t.key.morton;
      }
    }
  }
}

TEST(Greedy, BudgetDiscipline) {
  std::mt19937 rng(13);
  for (int inst = 0; inst < 1000; ++inst) {
    std::vector<TileChoice> tiles;
    std::uniform_int_distribution<int> kdist(1, 8);
    const int k = kdist(rng);
    double max_increment = 0.0;
    for (int i = 0; i < k; ++i) {
      tiles.push_back(fixtures::random_tile(rng, static_cast<std::uint32_t>(i), 5, true));
      const auto& t = tiles.back();
      for (int m = t.buffered; m <= t.max_representation(); ++m) {
        max_increment = std::max(max_increment, t.cost(m));
      }
    }
    std::uniform_real_distribution<double> frac(0.0, 1.2);
    const double budget = frac(rng) * fixtures::max_total_cost(tiles);
    const AllocationPlan over = greedy_allocate(tiles, budget);
    EXPECT_LE(over.requested_bits, budget + max_increment + 1e-9);
    const AllocationPlan strict = greedy_allocate(tiles, budget, BudgetMode::kStrict);
    EXPECT_LE(strict.requested_bits, budget + 1e-9);
  }
}

TEST(Greedy, RaisingBufferedUtilityFlattensTheTile) {
  std::mt19937 rng(31);
  for (int inst = 0; inst < 500; ++inst) {
    std::vector<TileChoice> tiles;
    for (std::uint32_t i = 0; i < 4; ++i) {
      tiles.push_back(fixtures::random_tile(rng, i, 5, false));
    }
    // Tile 0 holds rung 1; raise its utility towards rung 2.
    TileChoice& held = tiles[0];
    if (held.max_representation() < 2) continue;
    held.buffered = held.n = 1;
    const double lo = held.utility[1];
    const double hi = held.utility[2];
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const double budget = frac(rng) * fixtures::max_total_cost(tiles);

    const AllocationPlan before = greedy_allocate(tiles, budget);
    const double lambda_before = max_lambda(held).first;
    std::vector<TileChoice> raised = tiles;
    raised[0].utility[1] = lo + (hi - lo) * frac(rng);
    const double lambda_after = max_lambda(raised[0]).first;
    EXPECT_LE(lambda_after, lambda_before + 1e-15);

    const AllocationPlan after = greedy_allocate(raised, budget);
    for (std::size_t i = 1; i < tiles.size(); ++i) {
      EXPECT_GE(after.selection(raised[i]), before.selection(tiles[i]))
          << "instance " << inst << " tile " << i;
    }
  }
}

TEST(Greedy, DeterministicTraceCsv) {
  std::mt19937 rng(5);
  std::vector<TileChoice> tiles;
  for (std::uint32_t i = 0; i < 6; ++i) tiles.push_back(fixtures::random_tile(rng, i, 5, true));
  std::ostringstream a;
  std::ostringstream b;
  write_trace_csv(a, greedy_allocate(tiles, 300.0));
  write_trace_csv(b, greedy_allocate(tiles, 300.0));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("step,object,segment,gof,morton,lambda,m,consumed_bits\n", 0), 0u);
}

}  // namespace
}  // namespace volu
