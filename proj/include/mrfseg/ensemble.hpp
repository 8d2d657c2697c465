#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mrfseg/bitplane.hpp"
#include "mrfseg/grid.hpp"
#include "mrfseg/mrf.hpp"
#include "mrfseg/parallel.hpp"

namespace mrfseg {

enum class Optimizer { icm, sa };

/// Which MRF class counts as object after optimisation.
enum class Polarity { bright, dark };

struct EnsembleConfig {
  double beta = 1.0;
  Neighborhood neighborhood = Neighborhood::four;
  Optimizer optimizer = Optimizer::icm;
  std::size_t max_sweeps = 100;
  /// Member j is annealed with seed `schedule.seed + j`.
  SaSchedule schedule{};
  bool reestimate = false;
  Polarity polarity = Polarity::bright;
  std::size_t threads = 1;
};

struct EnsembleResult {
  ConfidenceMap votes;
  std::array<LabelField, kPlaneCount> members;
  std::array<OptimizeReport, kPlaneCount> reports;
};

/// Flips the labelling globally when needed so that label 1 is the class with
/// the higher (Polarity::bright) or lower (Polarity::dark) mean intensity.
/// Equal means, or an empty class, leave the labelling unchanged.
inline LabelField orient_object_label(const GrayImage& image, const LabelField& labels,
                                      Polarity polarity = Polarity::bright) {
  require_same_shape(image, labels, "image and labels differ in size");
  std::array<double, 2> sum{};
  std::array<std::size_t, 2> count{};
  for (std::size_t i = 0; i < image.size(); ++i) {
    sum[labels[i]] += image[i];
    ++count[labels[i]];
  }
  if (count[0] == 0 || count[1] == 0) return labels;
  const double mean0 = sum[0] / static_cast<double>(count[0]);
  const double mean1 = sum[1] / static_cast<double>(count[1]);
  const bool flip = polarity == Polarity::bright ? mean1 < mean0 : mean1 > mean0;
  if (!flip) return labels;
  LabelField out = labels;
  for (auto& l : out) l ^= 1u;
  return out;
}

/// One optimisation per bit plane, each initialised from and parameterised by
/// that plane, followed by pixelwise voting over the oriented results.
inline EnsembleResult segment_ensemble(const GrayImage& image, const EnsembleConfig& config) {
  const BitPlaneSet planes = slice(image);
  EnsembleResult out;
  detail::parallel_for(kPlaneCount, config.threads, [&](std::size_t j) {
    const LabelField& initial = planes.planes[j];
    MrfModel model;
    model.params = estimate_params(image, initial);
    model.beta = config.beta;
    model.neighborhood = config.neighborhood;
    OptimizeResult r;
    if (config.optimizer == Optimizer::sa) {
      SaSchedule schedule = config.schedule;
      schedule.seed += j;
      r = simulated_annealing(image, initial, model, schedule, config.reestimate);
    } else {
      r = icm(image, initial, model, config.max_sweeps, config.reestimate);
    }
    out.members[j] = orient_object_label(image, r.labels, config.polarity);
    out.reports[j] = r.report;
  });

  std::vector<std::uint8_t> votes(image.size(), 0);
  for (const auto& m : out.members)
    for (std::size_t i = 0; i < votes.size(); ++i) votes[i] = static_cast<std::uint8_t>(votes[i] + m[i]);
  out.votes = ConfidenceMap(image.width(), image.height(), std::move(votes));
  return out;
}

inline constexpr int kMaxLevel = 7;

/// Pixel is object iff votes > level, so level 0 admits any vote and level 7
/// requires unanimity.
inline BinaryMask threshold_confidence(const ConfidenceMap& map, int level) {
  if (level < 0 || level > kMaxLevel) detail::fail(Errc::invalid_argument, "confidence level must be in [0,7]");
  std::vector<std::uint8_t> bits(map.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = static_cast<std::uint8_t>(map[i] > level);
  return BinaryMask(map.width(), map.height(), std::move(bits));
}

/// Probability map for display: votes * 255 / 8, rounded half up.
inline GrayImage confidence_to_image(const ConfidenceMap& map) {
  std::vector<std::uint8_t> px(map.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>((map[i] * 255u + 4u) / 8u);
  return GrayImage(map.width(), map.height(), std::move(px));
}

/// Inverse of `confidence_to_image` (nearest vote count).
inline ConfidenceMap image_to_confidence(const GrayImage& image) {
  std::vector<std::uint8_t> votes(image.size());
  for (std::size_t i = 0; i < votes.size(); ++i) votes[i] = static_cast<std::uint8_t>((image[i] * 8u + 127u) / 255u);
  return ConfidenceMap(image.width(), image.height(), std::move(votes));
}

}  // namespace mrfseg
