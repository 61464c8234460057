#include "volu/utility_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "volu/errors.hpp"

namespace volu {

void PredictorConfig::validate() const {
  if (p_err_min < 0.0) throw ValidationError("p_err_min must be >= 0");
  if (p_err_slope < 0.0) throw ValidationError("p_err_slope must be >= 0");
  if (p_err_min + p_err_slope > 0.5) {
    throw ValidationError("p_err_min + p_err_slope must not exceed 0.5");
  }
  if (fixed_window < 0.0) throw ValidationError("fixed_window must be >= 0");
}

UtilityCoeffs normalize_coeffs(std::span<const double> ladder) {
  if (ladder.empty()) throw DomainError("empty bandwidth ladder");
  const double lo = ladder.front();
  const double hi = ladder.back();
  if (!(lo > 0.0) || hi < lo) {
    throw DomainError("ladder must satisfy 0 < B_1 <= B_M");
  }
  UtilityCoeffs c;
  c.beta = std::numbers::e / lo;
  c.alpha = 1.0 / (1.0 + std::log(hi / lo));
  return c;
}

UtilityCoeffs normalize_coeffs(const ObjectManifest& manifest) {
  std::vector<double> ladder;
  for (const auto& r : manifest.representations) ladder.push_back(r.bandwidth);
  return normalize_coeffs(ladder);
}

double bandwidth_utility(double bandwidth, const UtilityCoeffs& coeffs) {
  if (bandwidth < 0.0) throw DomainError("bandwidth must be >= 0");
  if (bandwidth == 0.0) return 0.0;
  const double u = coeffs.alpha * std::log(coeffs.beta * bandwidth);
  if (u < 0.0) {
    spdlog::warn("utility of {} bps is negative under the current "
                 "normalization; clamping to 0", bandwidth);
    return 0.0;
  }
  return u;
}

double p_err(double tau_k, const WindowEdges& window,
             const PredictorConfig& cfg) {
  constexpr double kEps = 1e-9;
  if (tau_k < window.trail - kEps || tau_k > window.lead + kEps) {
    throw DomainError("tile media time lies outside the window");
  }
  const double denom = cfg.fixed_window > 0.0 ? cfg.fixed_window : window.span;
  const double frac =
      denom > 0.0 ? std::clamp((tau_k - window.trail) / denom, 0.0, 1.0) : 0.0;
  return cfg.p_err_min + cfg.p_err_slope * frac;
}

double p_visible(bool visible, double p_err) {
  return visible ? 1.0 - p_err : p_err;
}

double p_visible(const Vec3& tile_pos, std::uint32_t normal_code,
                 const Viewpoint& view, double p_err) {
  return p_visible(is_visible(tile_pos, normal_code, view), p_err);
}

std::vector<double> tile_utilities(const TileGeometry& tile,
                                   std::span<const Viewpoint> views,
                                   const ObjectManifest& manifest,
                                   const UtilityCoeffs& coeffs, double p_err) {
  if (views.empty()) throw DomainError("tile utility needs at least one view");
  const int reps = manifest.representation_count();
  std::vector<double> out(static_cast<std::size_t>(reps) + 1, 0.0);
  const double min_dist = 0.5 * manifest.tile_width_m();
  for (const auto& view : views) {
    const double dist =
        std::max((tile.position - view.position).norm(), min_dist);
    const double p = p_visible(tile.position, tile.normal_code, view, p_err);
    for (int m = 1; m <= reps; ++m) {
      const auto& rep = manifest.representation(m);
      const double lod = distinguishable_voxels_at(rep, manifest, dist, view).lod;
      const double value = bandwidth_utility(rep.bandwidth, coeffs) * (lod * p);
      auto& slot = out[static_cast<std::size_t>(m)];
      slot = std::max(slot, value);
    }
  }
  return out;
}

double tile_utility(const TileGeometry& tile, int m,
                    std::span<const Viewpoint> views,
                    const ObjectManifest& manifest,
                    const UtilityCoeffs& coeffs, double p_err) {
  if (views.empty()) throw DomainError("tile utility needs at least one view");
  if (m == 0) return 0.0;
  const auto& rep = manifest.representation(m);
  const double u = bandwidth_utility(rep.bandwidth, coeffs);
  const double min_dist = 0.5 * manifest.tile_width_m();
  double best = 0.0;
  for (const auto& view : views) {
    const double dist =
        std::max((tile.position - view.position).norm(), min_dist);
    const double lod = distinguishable_voxels_at(rep, manifest, dist, view).lod;
    best = std::max(best, lod * p_visible(tile.position, tile.normal_code,
                                          view, p_err));
  }
  return u * best;
}

double tile_utility(const TileGeometry& tile, int m,
                    std::span<const Viewpoint> views,
                    const ObjectManifest& manifest,
                    const UtilityCoeffs& coeffs, double tau_k,
                    const WindowEdges& window, const PredictorConfig& cfg) {
  return tile_utility(tile, m, views, manifest, coeffs,
                      p_err(tau_k, window, cfg));
}

}  // namespace volu
