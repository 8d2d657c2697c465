#pragma once

// Binary MRF segmentation model: Gaussian data term per label, Potts smoothness
// term between neighbours, minimised by ICM or simulated annealing.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mrfseg/error.hpp"
#include "mrfseg/grid.hpp"

namespace mrfseg {

enum class Neighborhood { four = 4, eight = 8 };

/// Gaussian class model: mean and standard deviation in gray levels.
struct ClassParams {
  double mean = 0.0;
  double std = 1.0;

  friend bool operator==(const ClassParams&, const ClassParams&) = default;
};

inline constexpr double kStdFloor = 0.5;

struct MrfModel {
  std::array<ClassParams, 2> params{};
  double beta = 1.0;
  Neighborhood neighborhood = Neighborhood::four;

  void validate() const {
    detail::require(beta > 0.0 && std::isfinite(beta), Errc::invalid_argument, "beta must be positive");
    for (const auto& p : params) {
      detail::require(p.std > 0.0 && std::isfinite(p.std) && std::isfinite(p.mean), Errc::invalid_argument,
                      "class std must be positive and finite");
    }
  }
};

/// Geometric cooling: one full sweep per temperature, T <- T * cooling while T >= t_min.
struct SaSchedule {
  double t0 = 4.0;
  double cooling = 0.95;
  double t_min = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(t_min > 0.0 && t0 > t_min, Errc::invalid_argument, "SA schedule needs t0 > t_min > 0");
    detail::require(cooling > 0.0 && cooling < 1.0, Errc::invalid_argument, "SA cooling must be in (0,1)");
  }
};

struct OptimizeReport {
  double final_energy = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
};

struct OptimizeResult {
  LabelField labels;
  OptimizeReport report;
  /// Model in force at the end; differs from the input only when re-estimating.
  MrfModel model;
};

namespace detail {

struct Offset {
  int dx;
  int dy;
};

inline constexpr std::array<Offset, 4> kFour{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
inline constexpr std::array<Offset, 8> kEight{{{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
// Each unordered neighbour pair is reached exactly once through these.
inline constexpr std::array<Offset, 2> kFourForward{{{1, 0}, {0, 1}}};
inline constexpr std::array<Offset, 4> kEightForward{{{1, 0}, {0, 1}, {1, 1}, {-1, 1}}};

inline std::span<const Offset> neighbor_offsets(Neighborhood n) {
  if (n == Neighborhood::eight) return kEight;
  return kFour;
}

inline std::span<const Offset> forward_offsets(Neighborhood n) {
  if (n == Neighborhood::eight) return kEightForward;
  return kFourForward;
}

inline bool in_bounds(std::size_t w, std::size_t h, std::size_t x, std::size_t y, Offset o) {
  const long nx = static_cast<long>(x) + o.dx;
  const long ny = static_cast<long>(y) + o.dy;
  return nx >= 0 && ny >= 0 && nx < static_cast<long>(w) && ny < static_cast<long>(h);
}

}  // namespace detail

/// Gaussian negative log-likelihood: log(sqrt(2 pi) sigma) + (i - mean)^2 / (2 sigma^2).
inline double singleton_energy(double intensity, int label, const MrfModel& model) {
  const ClassParams& p = model.params[static_cast<std::size_t>(label)];
  const double d = intensity - p.mean;
  return std::log(std::sqrt(2.0 * std::numbers::pi) * p.std) + d * d / (2.0 * p.std * p.std);
}

/// Potts pair term: -beta for equal labels, +beta otherwise.
constexpr double doubleton_energy(int label_a, int label_b, double beta) noexcept {
  return label_a == label_b ? -beta : beta;
}

/// Per-class sample mean and population std of the intensities under each
/// label, std floored at `std_floor`. An empty class gets mean 255 - other.mean
/// and std = std_floor so it still competes for extreme intensities.
inline std::array<ClassParams, 2> estimate_params(const GrayImage& image, const LabelField& labels,
                                                  double std_floor = kStdFloor) {
  require_same_shape(image, labels, "image and labels differ in size");
  std::array<double, 2> sum{};
  std::array<std::size_t, 2> count{};
  for (std::size_t i = 0; i < image.size(); ++i) {
    sum[labels[i]] += image[i];
    ++count[labels[i]];
  }
  std::array<double, 2> mean{};
  for (int c = 0; c < 2; ++c) mean[c] = count[c] ? sum[c] / static_cast<double>(count[c]) : 0.0;
  std::array<double, 2> sq{};
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double d = image[i] - mean[labels[i]];
    sq[labels[i]] += d * d;
  }

  std::array<ClassParams, 2> out{};
  for (int c = 0; c < 2; ++c) {
    if (count[c] == 0) continue;
    out[c].mean = mean[c];
    out[c].std = std::max(std::sqrt(sq[c] / static_cast<double>(count[c])), std_floor);
  }
  for (int c = 0; c < 2; ++c) {
    if (count[c] != 0) continue;
    out[c].mean = 255.0 - out[1 - c].mean;
    out[c].std = std_floor;
  }
  return out;
}

/// Singleton term at (x, y) for `candidate` plus the pair terms against every
/// in-bounds neighbour's current label.
inline double local_energy(const GrayImage& image, const LabelField& labels, std::size_t x, std::size_t y,
                           int candidate, const MrfModel& model) {
  require_same_shape(image, labels, "image and labels differ in size");
  if (x >= image.width() || y >= image.height()) detail::fail(Errc::invalid_argument, "pixel out of bounds");
  double e = singleton_energy(image(x, y), candidate, model);
  for (const auto o : detail::neighbor_offsets(model.neighborhood)) {
    if (!detail::in_bounds(image.width(), image.height(), x, y, o)) continue;
    e += doubleton_energy(candidate, labels(x + o.dx, y + o.dy), model.beta);
  }
  return e;
}

/// Total energy: all singleton terms plus one pair term per distinct neighbour pair.
inline double global_energy(const GrayImage& image, const LabelField& labels, const MrfModel& model) {
  require_same_shape(image, labels, "image and labels differ in size");
  const auto fwd = detail::forward_offsets(model.neighborhood);
  double e = 0.0;
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      const int l = labels(x, y);
      e += singleton_energy(image(x, y), l, model);
      for (const auto o : fwd) {
        if (detail::in_bounds(image.width(), image.height(), x, y, o))
          e += doubleton_energy(l, labels(x + o.dx, y + o.dy), model.beta);
      }
    }
  }
  return e;
}

namespace detail {

// Sweep kernel shared by ICM and SA. Singleton terms are tabulated per
// intensity, and the pair sum is derived from the count of label-1 neighbours.
class Sweeper {
public:
  Sweeper(const GrayImage& image, const MrfModel& model) : image_(image) { set_model(model); }

  void set_model(const MrfModel& model) {
    model_ = model;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 256; ++i) table_[c][i] = singleton_energy(i, c, model_);
    offsets_ = neighbor_offsets(model_.neighborhood);
  }

  const MrfModel& model() const { return model_; }

  /// Local energy of label 1 minus local energy of label 0 at pixel index i.
  double delta_one_minus_zero(const LabelField& labels, std::size_t x, std::size_t y) const {
    const std::size_t w = image_.width();
    const std::size_t h = image_.height();
    int ones = 0;
    int total = 0;
    const bool interior = x > 0 && y > 0 && x + 1 < w && y + 1 < h;
    for (const auto o : offsets_) {
      if (!interior && !in_bounds(w, h, x, y, o)) continue;
      ones += labels(x + o.dx, y + o.dy);
      ++total;
    }
    const std::uint8_t v = image_(x, y);
    // pair sum for label c: beta * (total - 2 * same_c)
    const double pair1 = model_.beta * (total - 2 * ones);
    const double pair0 = model_.beta * (total - 2 * (total - ones));
    return (table_[1][v] + pair1) - (table_[0][v] + pair0);
  }

private:
  const GrayImage& image_;
  MrfModel model_;
  std::array<std::array<double, 256>, 2> table_{};
  std::span<const Offset> offsets_;
};

}  // namespace detail

/// Iterated conditional modes. Raster sweeps assign each pixel its
/// lower-energy label, keeping the current label on exact ties, until a sweep
/// changes nothing or `max_sweeps` is reached. With `reestimate` the class
/// parameters are refreshed from the labelling after every sweep; energy is
/// monotone non-increasing only without it.
inline OptimizeResult icm(const GrayImage& image, const LabelField& initial, const MrfModel& model,
                          std::size_t max_sweeps = 100, bool reestimate = false) {
  require_same_shape(image, initial, "image and initial labelling differ in size");
  model.validate();
  detail::require(max_sweeps >= 1, Errc::invalid_argument, "max_sweeps must be at least 1");

  OptimizeResult out{initial, {}, model};
  LabelField& labels = out.labels;
  detail::Sweeper sweeper(image, model);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    std::size_t changed = 0;
    for (std::size_t y = 0; y < image.height(); ++y) {
      for (std::size_t x = 0; x < image.width(); ++x) {
        const double d = sweeper.delta_one_minus_zero(labels, x, y);
        std::uint8_t& l = labels(x, y);
        const std::uint8_t best = d < 0.0 ? 1 : d > 0.0 ? 0 : l;
        if (best != l) {
          l = best;
          ++changed;
        }
      }
    }
    out.report.sweeps = sweep + 1;
    if (reestimate) {
      MrfModel refreshed = sweeper.model();
      refreshed.params = estimate_params(image, labels);
      sweeper.set_model(refreshed);
    }
    if (changed == 0) {
      out.report.converged = true;
      break;
    }
  }
  out.model = sweeper.model();
  out.report.final_energy = global_energy(image, labels, out.model);
  return out;
}

/// Metropolis simulated annealing with single-pixel flips in raster order.
/// Returns the lowest-energy labelling seen. `converged` reports whether the
/// last sweep accepted no flip. With `reestimate`, parameters are refreshed
/// after each sweep and best-seen tracking restarts under the new parameters.
inline OptimizeResult simulated_annealing(const GrayImage& image, const LabelField& initial, const MrfModel& model,
                                          const SaSchedule& schedule, bool reestimate = false) {
  require_same_shape(image, initial, "image and initial labelling differ in size");
  model.validate();
  schedule.validate();

  OptimizeResult out{initial, {}, model};
  LabelField& labels = out.labels;
  detail::Sweeper sweeper(image, model);
  std::mt19937_64 rng(schedule.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Flips made since the best-seen state, as a parity set, so the best state
  // can be restored without copying the field on every improvement.
  std::vector<std::uint8_t> parity(labels.size(), 0);
  std::vector<std::size_t> touched;
  auto mark_best = [&] {
    for (const std::size_t i : touched) parity[i] = 0;
    touched.clear();
  };

  double energy = global_energy(image, labels, model);
  double best = energy;
  std::size_t accepted = 0;
  for (double t = schedule.t0; t >= schedule.t_min; t *= schedule.cooling) {
    accepted = 0;
    for (std::size_t y = 0; y < image.height(); ++y) {
      for (std::size_t x = 0; x < image.width(); ++x) {
        std::uint8_t& l = labels(x, y);
        const double d = sweeper.delta_one_minus_zero(labels, x, y);
        const double delta = l ? -d : d;
        if (delta > 0.0 && uniform(rng) >= std::exp(-delta / t)) continue;
        l ^= 1u;
        ++accepted;
        energy += delta;
        const std::size_t i = y * image.width() + x;
        if ((parity[i] ^= 1u) != 0) touched.push_back(i);
        if (energy < best) {
          best = energy;
          mark_best();
        }
      }
    }
    ++out.report.sweeps;
    if (reestimate) {
      MrfModel refreshed = sweeper.model();
      refreshed.params = estimate_params(image, labels);
      sweeper.set_model(refreshed);
      energy = global_energy(image, labels, refreshed);
      best = energy;
      mark_best();
    }
  }
  for (const std::size_t i : touched) {
    if (parity[i]) {
      labels[i] ^= 1u;
      parity[i] = 0;
    }
  }
  out.model = sweeper.model();
  out.report.converged = out.report.sweeps > 0 && accepted == 0;
  out.report.final_energy = global_energy(image, labels, out.model);
  return out;
}

}  // namespace mrfseg
