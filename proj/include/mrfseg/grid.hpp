#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mrfseg/error.hpp"

namespace mrfseg {

/// Row-major 2-D field of values. `Tag` keeps fields with the same element
/// type but different meaning (intensities, labels, vote counts) from being
/// mixed up at compile time.
template <typename T, typename Tag>
class Grid {
public:
  using value_type = T;

  Grid() = default;

  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(checked_area(width, height), fill) {
    Tag::validate(data_);
  }

  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_area(width, height)) {
      detail::fail(Errc::dimension_mismatch,
                   "grid data length " + std::to_string(data_.size()) + " != " +
                       std::to_string(width) + "x" + std::to_string(height));
    }
    Tag::validate(data_);
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  T operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }

  std::span<const T> values() const noexcept { return data_; }
  std::span<T> values() noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }

  template <typename U, typename OtherTag>
  bool same_shape(const Grid<U, OtherTag>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  static std::size_t checked_area(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) detail::fail(Errc::empty_image, "grid dimensions must be positive");
    return width * height;
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

struct IntensityTag {
  static void validate(const std::vector<std::uint8_t>&) {}
};

struct BinaryTag {
  static void validate(const std::vector<std::uint8_t>& data) {
    if (std::any_of(data.begin(), data.end(), [](std::uint8_t v) { return v > 1; }))
      detail::fail(Errc::invalid_argument, "binary field holds a value outside {0,1}");
  }
};

struct VoteTag {
  static constexpr std::uint8_t max_votes = 8;
  static void validate(const std::vector<std::uint8_t>& data) {
    if (std::any_of(data.begin(), data.end(), [](std::uint8_t v) { return v > max_votes; }))
      detail::fail(Errc::invalid_argument, "vote count outside [0,8]");
  }
};

/// 8-bit grayscale intensities.
using GrayImage = Grid<std::uint8_t, IntensityTag>;
/// Values in {0,1}; 1 marks the object (cell) class.
using BinaryMask = Grid<std::uint8_t, BinaryTag>;
/// One MRF configuration. Same representation as a mask.
using LabelField = BinaryMask;
/// Per-pixel count of ensemble members voting "object", in [0,8].
using ConfidenceMap = Grid<std::uint8_t, VoteTag>;

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (!a.same_shape(b)) detail::fail(Errc::dimension_mismatch, what);
}

}  // namespace mrfseg
