#pragma once

#include <span>
#include <vector>

#include "volu/media_model.hpp"
#include "volu/view_geometry.hpp"
#include "volu/window_buffer.hpp"

namespace volu {

// u(B) = alpha * ln(beta * B), normalized per object so that the lowest rung
// maps to alpha > 0 and the top rung to 1.
struct UtilityCoeffs {
  double alpha = 1.0;
  double beta = 1.0;
};

// Prediction-error model: p_err grows linearly from p_err_min at the trailing
// edge to p_err_min + p_err_slope at the leading edge.
struct PredictorConfig {
  double p_err_min = 0.1;
  double p_err_slope = 0.3;
  // When set, the distance from the trailing edge is divided by this fixed
  // window length (media seconds) instead of the instantaneous v * dW(t).
  double fixed_window = 0.0;

  void validate() const;
};

UtilityCoeffs normalize_coeffs(std::span<const double> ladder_bps);
UtilityCoeffs normalize_coeffs(const ObjectManifest& manifest);

// Zero at B = 0; negative values are clamped to zero.
double bandwidth_utility(double bandwidth, const UtilityCoeffs& coeffs);

// Throws DomainError if tau_k lies outside [trail, lead].
double p_err(double tau_k, const WindowEdges& window,
             const PredictorConfig& cfg = {});

double p_visible(bool visible, double p_err);
double p_visible(const Vec3& tile_pos, std::uint32_t normal_code,
                 const Viewpoint& view, double p_err);

// Geometry of one tile in world space.
struct TileGeometry {
  Vec3 position = Vec3::Zero();
  std::uint32_t normal_code = 0;
};

// U(m) = u(B_m) * max over views of LOD(m, v) * P(v). U(0) = 0.
// Throws DomainError for an empty view set.
double tile_utility(const TileGeometry& tile, int m,
                    std::span<const Viewpoint> views,
                    const ObjectManifest& manifest,
                    const UtilityCoeffs& coeffs, double p_err);

// U(0..M) for one tile in a single pass over the views.
std::vector<double> tile_utilities(const TileGeometry& tile,
                                   std::span<const Viewpoint> views,
                                   const ObjectManifest& manifest,
                                   const UtilityCoeffs& coeffs, double p_err);

// Convenience overload computing p_err from the tile's media time.
double tile_utility(const TileGeometry& tile, int m,
                    std::span<const Viewpoint> views,
                    const ObjectManifest& manifest,
                    const UtilityCoeffs& coeffs, double tau_k,
                    const WindowEdges& window, const PredictorConfig& cfg);

}  // namespace volu
