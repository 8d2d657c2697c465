#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mrfseg/metrics.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace mrfseg;

namespace {

BinaryMask mask(std::vector<std::uint8_t> v) {
  const std::size_t n = v.size();
  return BinaryMask(n, 1, std::move(v));
}

}  // namespace

TEST(Confusion, Examples) {
  EXPECT_EQ(confusion(mask({1, 0, 1, 0}), mask({1, 0, 1, 0})), (ConfusionCounts{2, 0, 0, 2}));
  EXPECT_EQ(confusion(mask({1, 1}), mask({0, 0})), (ConfusionCounts{0, 0, 2, 0}));
  EXPECT_EQ(confusion(mask({0, 1}), mask({1, 1})), (ConfusionCounts{0, 1, 0, 1}));
  EXPECT_THROW(confusion(mask({1}), mask({1, 0})), Error);
}

TEST(Confusion, MatchesTallyOracle) {
  std::mt19937_64 rng(64);
  for (int k = 0; k < 200; ++k) {
    const auto seg = testkit::random_mask(rng, 8, 8, 0.3);
    const auto gt = testkit::random_mask(rng, 8, 8, 0.6);
    const auto c = confusion(seg, gt);
    EXPECT_EQ(c, oracle::tally(seg, gt));
    EXPECT_EQ(c.total(), 64u);
  }
}

TEST(SymmetricDifference, Values) {
  EXPECT_EQ(symmetric_difference({5, 0, 0, 7}), 0.0);
  EXPECT_EQ(symmetric_difference({0, 3, 4, 0}), 1.0);
  EXPECT_DOUBLE_EQ(*symmetric_difference({4, 1, 2, 5}), 0.25);
  EXPECT_EQ(symmetric_difference_raw({4, 1, 2, 5}), 3u);
  EXPECT_FALSE(symmetric_difference({}));
}

TEST(Rates, SensitivitySpecificityPpv) {
  EXPECT_DOUBLE_EQ(*sensitivity({0, 1, 0, 3}), 0.75);
  EXPECT_DOUBLE_EQ(*sensitivity({4, 0, 2, 3}), 1.0);
  EXPECT_FALSE(sensitivity({4, 0, 2, 0}));

  EXPECT_DOUBLE_EQ(*specificity({9, 0, 1, 0}), 0.9);
  EXPECT_DOUBLE_EQ(*specificity({3, 0, 0, 1}), 1.0);
  // all-object segmentation of mixed ground truth
  EXPECT_DOUBLE_EQ(*specificity(confusion(mask({1, 1, 1}), mask({0, 1, 0}))), 0.0);
  EXPECT_FALSE(specificity({0, 2, 0, 1}));

  EXPECT_DOUBLE_EQ(*ppv({0, 0, 2, 98}), 0.98);
  EXPECT_DOUBLE_EQ(*ppv({0, 0, 0, 5}), 1.0);
  EXPECT_DOUBLE_EQ(*ppv({0, 0, 3, 1}), 0.25);
  EXPECT_FALSE(ppv({3, 2, 0, 0}));
}

TEST(Fscore, HarmonicMean) {
  EXPECT_DOUBLE_EQ(fscore(0.9, 0.9), 0.9);
  EXPECT_DOUBLE_EQ(fscore(1.0, 0.5), 2.0 / 3.0);
  EXPECT_EQ(fscore(0.0, 0.0), 0.0);
  // Reference row at confidence level 3: SEN 0.84, PPV 0.98, FSCORE 0.90.
  EXPECT_NEAR(fscore(0.84, 0.98), 0.9046153846153846, 1e-12);
  EXPECT_NEAR(fscore(0.84, 0.98), 0.90, 0.005);
}

TEST(Fscore, SymmetricAndBoundedByMean) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng);
    const double b = u(rng);
    EXPECT_EQ(fscore(a, b), fscore(b, a));
    EXPECT_LE(fscore(a, b), (a + b) / 2.0 + 1e-15);
  }
}

TEST(RandIndex, Values) {
  EXPECT_EQ(rand_index({5, 0, 0, 7}), 1.0);
  EXPECT_EQ(rand_index({0, 3, 4, 0}), 0.0);
  EXPECT_DOUBLE_EQ(*rand_index({56, 2, 2, 40}), 0.96);
  EXPECT_FALSE(rand_index({}));
}

TEST(Identities, RandIndexComplementsSymmetricDifference) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 500; ++k) {
    const std::size_t w = 1 + rng() % 20;
    const auto c = confusion(testkit::random_mask(rng, w, 3), testkit::random_mask(rng, w, 3));
    // exact in integers, and within rounding in floating point
    EXPECT_EQ((c.n11 + c.n00) + symmetric_difference_raw(c), c.total());
    EXPECT_NEAR(*rand_index(c), 1.0 - *symmetric_difference(c), 1e-15);
  }
}

TEST(Identities, PerfectSegmentation) {
  std::mt19937_64 rng(78);
  for (int k = 0; k < 50; ++k) {
    auto gt = testkit::random_mask(rng, 10, 10);
    gt[0] = 0;
    gt[1] = 1;
    const MetricReport m = evaluate(gt, gt);
    EXPECT_EQ(m.sd_normalized, 0.0);
    EXPECT_EQ(m.sd_raw, 0u);
    EXPECT_EQ(m.sen, 1.0);
    EXPECT_EQ(m.spe, 1.0);
    EXPECT_EQ(m.ppv, 1.0);
    EXPECT_EQ(m.fscore, 1.0);
    EXPECT_EQ(m.rand_index, 1.0);
  }
}

TEST(Evaluate, UndefinedRatesAreFlagged) {
  const MetricReport m = evaluate(mask({0, 0}), mask({0, 0}));
  EXPECT_FALSE(MetricReport::defined(m.sen));
  EXPECT_FALSE(MetricReport::defined(m.ppv));
  EXPECT_FALSE(MetricReport::defined(m.fscore));
  EXPECT_TRUE(MetricReport::defined(m.spe));
  EXPECT_EQ(m.rand_index, 1.0);
}

TEST(Roc, PerfectSeparation) {
  std::mt19937_64 rng(5);
  auto gt = testkit::random_mask(rng, 12, 12);
  gt[0] = 0;
  gt[1] = 1;
  std::vector<std::uint8_t> votes(gt.size());
  for (std::size_t i = 0; i < votes.size(); ++i) votes[i] = static_cast<std::uint8_t>(8 * gt[i]);
  const auto roc = roc_from_confidence(ConfidenceMap(12, 12, votes), gt);
  ASSERT_TRUE(roc);
  EXPECT_DOUBLE_EQ(roc->auc, 1.0);
}

TEST(Roc, ConstantMapIsChance) {
  const BinaryMask gt = mask({0, 1, 1, 0, 1});
  const auto roc = roc_from_confidence(ConfidenceMap(5, 1, 4), gt);
  ASSERT_TRUE(roc);
  EXPECT_DOUBLE_EQ(roc->auc, 0.5);
  for (int l = 0; l <= 3; ++l) EXPECT_EQ(roc->levels[l], (RocPoint{1.0, 1.0}));
  for (int l = 4; l <= 7; ++l) EXPECT_EQ(roc->levels[l], (RocPoint{0.0, 0.0}));
  EXPECT_EQ(roc->points.front(), (RocPoint{0.0, 0.0}));
  EXPECT_EQ(roc->points.back(), (RocPoint{1.0, 1.0}));
}

TEST(Roc, SingleClassTruthIsUndefined) {
  EXPECT_FALSE(roc_from_confidence(ConfidenceMap(3, 1, 2), mask({1, 1, 1})));
  EXPECT_FALSE(roc_from_confidence(ConfidenceMap(3, 1, 2), mask({0, 0, 0})));
}

TEST(Roc, LevelsMonotoneAndAucBounded) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const auto map = testkit::random_votes(rng, 10, 10);
    auto gt = testkit::random_mask(rng, 10, 10);
    gt[0] = 0;
    gt[1] = 1;
    const auto roc = roc_from_confidence(map, gt);
    ASSERT_TRUE(roc);
    for (int l = 1; l <= kMaxLevel; ++l) {
      EXPECT_LE(roc->levels[l].fpr, roc->levels[l - 1].fpr);
      EXPECT_LE(roc->levels[l].tpr, roc->levels[l - 1].tpr);
    }
    for (std::size_t i = 1; i < roc->points.size(); ++i) EXPECT_GE(roc->points[i].tpr, roc->points[i - 1].tpr);
    EXPECT_GE(roc->auc, 0.0);
    EXPECT_LE(roc->auc, 1.0);
  }
}

TEST(Roc, AucInvariantUnderIncreasingRelabel) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    // Draw votes from a 4-value subset of 0..8, then map that subset onto
    // another increasing 4-value subset.
    std::vector<int> all{0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> from;
    std::vector<int> to;
    std::sample(all.begin(), all.end(), std::back_inserter(from), 4, rng);
    std::sample(all.begin(), all.end(), std::back_inserter(to), 4, rng);
    std::vector<std::uint8_t> a(80);
    std::vector<std::uint8_t> b(80);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t pick = rng() % 4;
      a[i] = static_cast<std::uint8_t>(from[pick]);
      b[i] = static_cast<std::uint8_t>(to[pick]);
    }
    auto gt = testkit::random_mask(rng, 80, 1);
    gt[0] = 0;
    gt[1] = 1;
    const auto ra = roc_from_confidence(ConfidenceMap(80, 1, a), gt);
    const auto rb = roc_from_confidence(ConfidenceMap(80, 1, b), gt);
    EXPECT_NEAR(ra->auc, rb->auc, 1e-12);
  }
}

TEST(Roc, PerLevelCountsMatchThresholding) {
  std::mt19937_64 rng(14);
  const auto map = testkit::random_votes(rng, 15, 11);
  const auto gt = testkit::random_mask(rng, 15, 11);
  const auto counts = confusion_per_level(map, gt);
  for (int l = 0; l <= kMaxLevel; ++l) EXPECT_EQ(counts[l], confusion(threshold_confidence(map, l), gt));
}
