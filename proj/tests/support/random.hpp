#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mrfseg/grid.hpp"
#include "mrfseg/mrf.hpp"

namespace mrfseg::testkit {

inline GrayImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<std::uint8_t> px(w * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(d(rng));
  return GrayImage(w, h, std::move(px));
}

inline BinaryMask random_mask(std::mt19937_64& rng, std::size_t w, std::size_t h, double p = 0.5) {
  std::bernoulli_distribution d(p);
  std::vector<std::uint8_t> bits(w * h);
  for (auto& v : bits) v = static_cast<std::uint8_t>(d(rng));
  return BinaryMask(w, h, std::move(bits));
}

inline ConfidenceMap random_votes(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> d(0, 8);
  std::vector<std::uint8_t> v(w * h);
  for (auto& x : v) x = static_cast<std::uint8_t>(d(rng));
  return ConfidenceMap(w, h, std::move(v));
}

struct ModelRanges {
  double std_lo = 1.0;
  double std_hi = 60.0;
  double beta_lo = 0.1;
  double beta_hi = 3.0;
};

inline MrfModel random_model(std::mt19937_64& rng, Neighborhood n = Neighborhood::four, ModelRanges r = {}) {
  std::uniform_real_distribution<double> mean(0.0, 255.0);
  std::uniform_real_distribution<double> std(r.std_lo, r.std_hi);
  std::uniform_real_distribution<double> beta(r.beta_lo, r.beta_hi);
  MrfModel m;
  m.params = {ClassParams{mean(rng), std(rng)}, ClassParams{mean(rng), std(rng)}};
  m.beta = beta(rng);
  m.neighborhood = n;
  return m;
}

}  // namespace mrfseg::testkit
