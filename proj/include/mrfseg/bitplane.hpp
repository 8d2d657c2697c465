#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mrfseg/grid.hpp"

namespace mrfseg {

inline constexpr std::size_t kPlaneCount = 8;

/// planes[j] holds bit j of every pixel; j = 0 is the least significant bit.
struct BitPlaneSet {
  std::array<BinaryMask, kPlaneCount> planes;
};

inline BitPlaneSet slice(const GrayImage& image) {
  BitPlaneSet out;
  for (std::size_t j = 0; j < kPlaneCount; ++j) {
    std::vector<std::uint8_t> bits(image.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<std::uint8_t>((image[i] >> j) & 1u);
    out.planes[j] = BinaryMask(image.width(), image.height(), std::move(bits));
  }
  return out;
}

/// Inverse of `slice`.
inline GrayImage reconstruct(const BitPlaneSet& set) {
  const BinaryMask& first = set.planes.front();
  for (const auto& plane : set.planes) require_same_shape(first, plane, "bit planes differ in size");
  std::vector<std::uint8_t> data(first.size(), 0);
  for (std::size_t j = 0; j < kPlaneCount; ++j) {
    const auto& plane = set.planes[j];
    for (std::size_t i = 0; i < data.size(); ++i) data[i] |= static_cast<std::uint8_t>(plane[i] << j);
  }
  return GrayImage(first.width(), first.height(), std::move(data));
}

}  // namespace mrfseg
