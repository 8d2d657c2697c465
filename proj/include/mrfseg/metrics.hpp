#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mrfseg/ensemble.hpp"
#include "mrfseg/grid.hpp"

namespace mrfseg {

/// Pixel counts indexed as n<seg><gt>: n01 = not segmented but in ground truth.
struct ConfusionCounts {
  std::uint64_t n00 = 0;
  std::uint64_t n01 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n11 = 0;

  std::uint64_t total() const noexcept { return n00 + n01 + n10 + n11; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    n00 += o.n00;
    n01 += o.n01;
    n10 += o.n10;
    n11 += o.n11;
    return *this;
  }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(const BinaryMask& seg, const BinaryMask& gt) {
  require_same_shape(seg, gt, "segmentation and ground truth differ in size");
  std::array<std::uint64_t, 4> n{};
  for (std::size_t i = 0; i < seg.size(); ++i) ++n[(seg[i] << 1) | gt[i]];
  return {n[0], n[1], n[2], n[3]};
}

namespace detail {

inline std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

/// Raw symmetric difference n01 + n10.
inline std::uint64_t symmetric_difference_raw(const ConfusionCounts& c) noexcept { return c.n01 + c.n10; }

/// (n01 + n10) / n. Undefined for empty masks.
inline std::optional<double> symmetric_difference(const ConfusionCounts& c) {
  return detail::ratio(c.n01 + c.n10, c.total());
}

/// Undefined when the ground truth has no object pixel.
inline std::optional<double> sensitivity(const ConfusionCounts& c) { return detail::ratio(c.n11, c.n11 + c.n01); }

/// Undefined when the ground truth has no background pixel.
inline std::optional<double> specificity(const ConfusionCounts& c) { return detail::ratio(c.n00, c.n00 + c.n10); }

/// Undefined when the segmentation marks nothing.
inline std::optional<double> ppv(const ConfusionCounts& c) { return detail::ratio(c.n11, c.n11 + c.n10); }

/// Harmonic mean of sensitivity and PPV; 0 when both are 0.
inline double fscore(double sen, double ppv_value) noexcept {
  if (sen + ppv_value == 0.0) return 0.0;
  return 2.0 * sen * ppv_value / (sen + ppv_value);
}

/// Pixelwise agreement (n11 + n00) / n.
inline std::optional<double> rand_index(const ConfusionCounts& c) { return detail::ratio(c.n11 + c.n00, c.total()); }

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

/// All measures for one comparison. Undefined rates are NaN; test with `defined`.
struct MetricReport {
  double sd_normalized = kUndefined;
  std::uint64_t sd_raw = 0;
  double sen = kUndefined;
  double spe = kUndefined;
  double ppv = kUndefined;
  double fscore = kUndefined;
  double rand_index = kUndefined;

  static bool defined(double v) noexcept { return !std::isnan(v); }
};

inline MetricReport evaluate(const ConfusionCounts& c) {
  MetricReport r;
  r.sd_normalized = symmetric_difference(c).value_or(kUndefined);
  r.sd_raw = symmetric_difference_raw(c);
  r.sen = sensitivity(c).value_or(kUndefined);
  r.spe = specificity(c).value_or(kUndefined);
  r.ppv = ppv(c).value_or(kUndefined);
  if (MetricReport::defined(r.sen) && MetricReport::defined(r.ppv)) r.fscore = fscore(r.sen, r.ppv);
  r.rand_index = rand_index(c).value_or(kUndefined);
  return r;
}

inline MetricReport evaluate(const BinaryMask& seg, const BinaryMask& gt) { return evaluate(confusion(seg, gt)); }

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  /// Sorted by fpr (then tpr), anchors (0,0) and (1,1) included.
  std::vector<RocPoint> points;
  /// (fpr, tpr) per confidence level 0..7, in level order.
  std::array<RocPoint, kMaxLevel + 1> levels{};
  double auc = 0.0;
};

/// Empirical ROC from per-level confusion counts (level 0..7), trapezoidal AUC.
/// Undefined when the ground truth lacks either class.
inline std::optional<RocCurve> roc_from_counts(std::span<const ConfusionCounts, kMaxLevel + 1> per_level) {
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  for (int level = 0; level <= kMaxLevel; ++level) {
    const auto& c = per_level[static_cast<std::size_t>(level)];
    const auto sen = sensitivity(c);
    const auto spe = specificity(c);
    if (!sen || !spe) return std::nullopt;
    curve.levels[static_cast<std::size_t>(level)] = {1.0 - *spe, *sen};
    curve.points.push_back(curve.levels[static_cast<std::size_t>(level)]);
  }
  curve.points.push_back({1.0, 1.0});
  std::sort(curve.points.begin(), curve.points.end(),
            [](const RocPoint& a, const RocPoint& b) { return std::pair(a.fpr, a.tpr) < std::pair(b.fpr, b.tpr); });
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return curve;
}

inline std::array<ConfusionCounts, kMaxLevel + 1> confusion_per_level(const ConfidenceMap& map, const BinaryMask& gt) {
  require_same_shape(map, gt, "confidence map and ground truth differ in size");
  // Histogram of (votes, gt) then cumulative sums give every level in one pass.
  std::array<std::array<std::uint64_t, 2>, VoteTag::max_votes + 1> hist{};
  for (std::size_t i = 0; i < map.size(); ++i) ++hist[map[i]][gt[i]];
  std::array<ConfusionCounts, kMaxLevel + 1> out{};
  for (int level = 0; level <= kMaxLevel; ++level) {
    ConfusionCounts& c = out[static_cast<std::size_t>(level)];
    for (int v = 0; v <= VoteTag::max_votes; ++v) {
      const bool on = v > level;
      c.n00 += on ? 0 : hist[v][0];
      c.n01 += on ? 0 : hist[v][1];
      c.n10 += on ? hist[v][0] : 0;
      c.n11 += on ? hist[v][1] : 0;
    }
  }
  return out;
}

inline std::optional<RocCurve> roc_from_confidence(const ConfidenceMap& map, const BinaryMask& gt) {
  const auto counts = confusion_per_level(map, gt);
  return roc_from_counts(counts);
}

}  // namespace mrfseg
