// Minimal library use: segment one image and print vote statistics.
//
//   segment_one <image.png> [mask-out.png]

#include <array>
#include <cstdio>

#include "mrfseg/mrfseg.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <image.png> [mask-out.png]\n", argv[0]);
    return 1;
  }
  try {
    const mrfseg::GrayImage image = mrfseg::load_gray(argv[1]);
    mrfseg::EnsembleConfig config;  // ICM, beta = 1, 4-neighbourhood
    const auto result = mrfseg::segment_ensemble(image, config);

    std::array<std::size_t, 9> histogram{};
    for (const auto v : result.votes) ++histogram[v];
    for (std::size_t v = 0; v < histogram.size(); ++v) std::printf("%zu votes: %zu pixels\n", v, histogram[v]);

    if (argc > 2) mrfseg::save_mask(mrfseg::threshold_confidence(result.votes, 3), argv[2]);
  } catch (const mrfseg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
