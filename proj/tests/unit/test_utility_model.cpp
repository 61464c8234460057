#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "volu/errors.hpp"
#include "volu/utility_model.hpp"

namespace volu {
namespace {

const std::vector<double> kLadder{4e6, 8e6, 12e6, 16e6, 20e6};

TEST(Normalization, LadderEndpoints) {
  const UtilityCoeffs c = normalize_coeffs(kLadder);
  const double alpha = 1.0 / (1.0 + std::log(5.0));
  EXPECT_NEAR(c.alpha, alpha, 1e-15);
  EXPECT_NEAR(c.alpha, 0.38323, 1e-5);
  EXPECT_NEAR(c.beta, std::numbers::e / 4e6, 1e-22);
  EXPECT_EQ(bandwidth_utility(0.0, c), 0.0);
  EXPECT_NEAR(bandwidth_utility(4e6, c), alpha, 1e-9);
  EXPECT_NEAR(bandwidth_utility(20e6, c), 1.0, 1e-9);
  EXPECT_NEAR(bandwidth_utility(8e6, c), alpha * (1.0 + std::log(2.0)), 1e-12);
  EXPECT_NEAR(bandwidth_utility(8e6, c), 0.64886, 1e-5);
}

TEST(Normalization, SingleRung) {
  const std::vector<double> one{5e6};
  const UtilityCoeffs c = normalize_coeffs(one);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_NEAR(bandwidth_utility(5e6, c), 1.0, 1e-12);
}

TEST(Normalization, NegativeUtilityClampsToZero) {
  const UtilityCoeffs c = normalize_coeffs(kLadder);
  EXPECT_EQ(bandwidth_utility(1e6, c), 0.0);  // ln(e/4) < 0
}

TEST(Normalization, ScalingPreservesRanking) {
  for (double scale : {0.2, 0.5, 3.0}) {
    std::vector<double> scaled;
    for (double b : kLadder) scaled.push_back(b * scale);
    const UtilityCoeffs c = normalize_coeffs(scaled);
    const UtilityCoeffs base = normalize_coeffs(kLadder);
    for (std::size_t i = 0; i < kLadder.size(); ++i) {
      // Normalized values depend only on the ratios, so they coincide here.
      EXPECT_NEAR(bandwidth_utility(scaled[i], c), bandwidth_utility(kLadder[i], base), 1e-12);
      if (i > 0) {
        EXPECT_GT(bandwidth_utility(scaled[i], c), bandwidth_utility(scaled[i - 1], c));
      }
    }
  }
}

TEST(PErr, EndpointsAndMidpoint) {
  const WindowEdges w{10.0, 15.0, 5.0};
  EXPECT_EQ(p_err(10.0, w), 0.1);
  EXPECT_EQ(p_err(15.0, w), 0.4);
  EXPECT_NEAR(p_err(12.5, w), 0.25, 1e-15);
}

TEST(PErr, OutsideWindowIsADomainError) {
  const WindowEdges w{10.0, 15.0, 5.0};
  EXPECT_THROW(p_err(9.0, w), DomainError);
  EXPECT_THROW(p_err(15.5, w), DomainError);
}

TEST(PErr, FixedWindowDenominator) {
  PredictorConfig cfg;
  cfg.fixed_window = 5.0;
  const WindowEdges ramping{0.0, 2.0, 2.0};
  EXPECT_NEAR(p_err(1.0, ramping, cfg), 0.1 + 0.3 * 0.2, 1e-15);
  EXPECT_NEAR(p_err(1.0, ramping), 0.25, 1e-15);
}

TEST(PErr, AlwaysWithinBounds) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double trail = 100.0 * u(rng);
    const double span = 0.1 + 5.0 * u(rng);
    const WindowEdges w{trail, trail + span, span};
    const double p = p_err(trail + span * u(rng), w);
    ASSERT_GE(p, 0.1);
    ASSERT_LE(p, 0.4);
    const double vis = p_visible(true, p);
    const double invis = p_visible(false, p);
    ASSERT_GE(vis, 0.1 - 1e-15);
    ASSERT_LE(vis, 0.9 + 1e-15);
    ASSERT_GE(invis, 0.1);
  }
}

TEST(PredictorConfig, Validation) {
  PredictorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.p_err_slope = 0.45;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = PredictorConfig{};
  cfg.p_err_min = -0.1;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(PVisible, Branches) {
  EXPECT_NEAR(p_visible(true, 0.1), 0.9, 1e-15);
  EXPECT_EQ(p_visible(false, 0.4), 0.4);
  EXPECT_NEAR(p_visible(true, 0.25), 0.75, 1e-15);
}

class TileUtilityTest : public ::testing::Test {
 protected:
  ObjectManifest manifest = make_default_manifest(2);
  UtilityCoeffs coeffs = normalize_coeffs(manifest);
  // Tile 0 sits at the (-x, -y, -z) corner of the centered cube; its normal
  // points along -x.
  TileGeometry tile{tile_world_position(manifest, 0), 1};
  Viewpoint facing = Viewpoint::looking_at(tile.position + Vec3(-2, 0, 0), tile.position);
  Viewpoint away = Viewpoint::looking_at(tile.position + Vec3(-2, 0, 0),
                                         tile.position + Vec3(-4, 0, 0));
};

TEST_F(TileUtilityTest, NullRepresentationIsZero) {
  const std::vector<Viewpoint> views{facing};
  EXPECT_EQ(tile_utility(tile, 0, views, manifest, coeffs, 0.1), 0.0);
}

TEST_F(TileUtilityTest, InvisibleTileUsesPErr) {
  const std::vector<Viewpoint> views{away};
  for (int m = 1; m <= manifest.representation_count(); ++m) {
    const auto& rep = manifest.representation(m);
    const double lod = distinguishable_voxels(rep, manifest, tile.position, away).lod;
    EXPECT_NEAR(tile_utility(tile, m, views, manifest, coeffs, 0.1),
                bandwidth_utility(rep.bandwidth, coeffs) * lod * 0.1, 1e-9);
  }
}

TEST_F(TileUtilityTest, MaxOverViews) {
  const std::vector<Viewpoint> both{away, facing};
  const std::vector<Viewpoint> only{facing};
  for (int m = 1; m <= manifest.representation_count(); ++m) {
    EXPECT_EQ(tile_utility(tile, m, both, manifest, coeffs, 0.2),
              tile_utility(tile, m, only, manifest, coeffs, 0.2));
  }
}

TEST_F(TileUtilityTest, EmptyViewSetIsADomainError) {
  const std::vector<Viewpoint> none;
  EXPECT_THROW(tile_utility(tile, 1, none, manifest, coeffs, 0.1), DomainError);
}

TEST_F(TileUtilityTest, VectorMatchesScalarAndIsMonotone) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 eye(u(rng), u(rng), u(rng));
    if ((eye - tile.position).norm() < 0.2) continue;
    const std::vector<Viewpoint> views{Viewpoint::looking_at(eye, tile.position)};
    const auto all = tile_utilities(tile, views, manifest, coeffs, 0.3);
    ASSERT_EQ(all.size(), static_cast<std::size_t>(manifest.representation_count() + 1));
    EXPECT_EQ(all[0], 0.0);
    for (int m = 1; m < static_cast<int>(all.size()); ++m) {
      EXPECT_EQ(all[m], tile_utility(tile, m, views, manifest, coeffs, 0.3));
      EXPECT_GE(all[m], all[m - 1]);
    }
  }
}

TEST_F(TileUtilityTest, TauOverloadComputesPErr) {
  const std::vector<Viewpoint> views{away};
  const WindowEdges w{0.0, 5.0, 5.0};
  EXPECT_EQ(tile_utility(tile, 3, views, manifest, coeffs, 0.0, w, PredictorConfig{}),
            tile_utility(tile, 3, views, manifest, coeffs, 0.1));
  EXPECT_EQ(tile_utility(tile, 3, views, manifest, coeffs, 5.0, w, PredictorConfig{}),
            tile_utility(tile, 3, views, manifest, coeffs, 0.4));
}

}  // namespace
}  // namespace volu
