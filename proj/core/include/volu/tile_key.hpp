#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace volu {

// Identifies one tile of one GOF of one segment of one object. `segment` is
// the 0-based position in the clip (not the start-number-shifted value), so
// looped passes over the same media map to the same key.
struct TileKey {
  std::uint32_t object = 0;
  std::uint32_t segment = 0;
  std::uint32_t gof = 0;
  std::uint32_t morton = 0;

  auto operator<=>(const TileKey&) const = default;
};

struct TileKeyHash {
  std::size_t operator()(const TileKey& k) const noexcept {
    std::uint64_t h = k.object;
    h = h * 0x9E3779B97F4A7C15ull + k.segment;
    h = h * 0x9E3779B97F4A7C15ull + k.gof;
    h = h * 0x9E3779B97F4A7C15ull + k.morton;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

}  // namespace volu
