#pragma once

// Dataset-level evaluation: segment every image, score each confidence level
// against ground truth, aggregate, and write CSV tables and ROC data.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mrfseg/ensemble.hpp"
#include "mrfseg/error.hpp"
#include "mrfseg/imageio.hpp"
#include "mrfseg/metrics.hpp"
#include "mrfseg/parallel.hpp"

namespace mrfseg {

enum class Aggregation {
  /// Unweighted mean of per-image metrics.
  mean,
  /// Metrics of the confusion counts summed over all images.
  pooled,
};

struct RunConfig {
  fs::path dataset_dir;
  std::string image_glob = "*.png";
  std::string mask_suffix = "_gt";
  std::optional<fs::path> mask_dir;
  int mask_threshold = 1;
  EnsembleConfig ensemble{};
  fs::path output_dir = ".";
  std::vector<int> levels{0, 1, 2, 3, 4, 5, 6, 7};
  Aggregation aggregation = Aggregation::mean;
  /// Images processed concurrently; members inside an image use ensemble.threads.
  std::size_t threads = 1;
};

struct AggregateRow {
  int level = 0;
  std::size_t image_count = 0;
  double sd_normalized = kUndefined;
  double sd_raw = kUndefined;
  double sen = kUndefined;
  double spe = kUndefined;
  double ppv = kUndefined;
  double fscore = kUndefined;
  double rand_index = kUndefined;
};

struct ImageResult {
  fs::path image;
  std::array<ConfusionCounts, kMaxLevel + 1> counts{};
  std::array<MetricReport, kMaxLevel + 1> metrics{};
  std::optional<RocCurve> roc;
};

struct BatchResult {
  std::vector<ImageResult> images;
  std::vector<fs::path> skipped;
  std::vector<AggregateRow> mean_rows;
  std::vector<AggregateRow> pooled_rows;
  std::optional<RocCurve> pooled_roc;

  const std::vector<AggregateRow>& rows(Aggregation mode) const {
    return mode == Aggregation::pooled ? pooled_rows : mean_rows;
  }
};

namespace detail {

// Mean over images where the metric is defined; NaN if none is.
template <typename Get>
double mean_defined(const std::vector<ImageResult>& images, std::size_t level, Get get) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& img : images) {
    const double v = get(img.metrics[level]);
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : kUndefined;
}

inline AggregateRow to_row(int level, std::size_t images, const MetricReport& m, double sd_raw) {
  return {level, images, m.sd_normalized, sd_raw, m.sen, m.spe, m.ppv, m.fscore, m.rand_index};
}

inline void validate_levels(const std::vector<int>& levels) {
  for (const int l : levels)
    require(l >= 0 && l <= kMaxLevel, Errc::invalid_argument, "reported levels must be within [0,7]");
}

}  // namespace detail

inline ImageResult evaluate_image(const fs::path& image_path, const fs::path& mask_path, const RunConfig& config) {
  const GrayImage image = load_gray(image_path);
  const BinaryMask gt = load_mask(mask_path, config.mask_threshold);
  require_same_shape(image, gt, ("image and mask differ in size: " + image_path.string()).c_str());
  const EnsembleResult seg = segment_ensemble(image, config.ensemble);
  ImageResult r;
  r.image = image_path;
  r.counts = confusion_per_level(seg.votes, gt);
  for (std::size_t l = 0; l < r.counts.size(); ++l) r.metrics[l] = evaluate(r.counts[l]);
  r.roc = roc_from_counts(r.counts);
  return r;
}

/// Evaluates every paired image and aggregates per confidence level in both
/// modes. Unpaired images are listed in `skipped` and never contribute.
inline BatchResult run_batch(const RunConfig& config) {
  detail::validate_levels(config.levels);
  const auto entries = list_dataset(config.dataset_dir, config.image_glob, config.mask_suffix, config.mask_dir);
  BatchResult out;
  std::vector<const DatasetEntry*> paired;
  for (const auto& e : entries) {
    if (e.mask) paired.push_back(&e);
    else out.skipped.push_back(e.image);
  }
  if (paired.empty())
    detail::fail(Errc::empty_dataset, "no image with a paired mask in " + config.dataset_dir.string());

  out.images.resize(paired.size());
  detail::parallel_for(paired.size(), config.threads, [&](std::size_t i) {
    out.images[i] = evaluate_image(paired[i]->image, *paired[i]->mask, config);
  });

  std::array<ConfusionCounts, kMaxLevel + 1> pooled{};
  for (const auto& img : out.images)
    for (std::size_t l = 0; l < pooled.size(); ++l) pooled[l] += img.counts[l];

  const std::size_t n = out.images.size();
  for (const int level : config.levels) {
    const auto l = static_cast<std::size_t>(level);
    AggregateRow mean;
    mean.level = level;
    mean.image_count = n;
    mean.sd_normalized = detail::mean_defined(out.images, l, [](const MetricReport& m) { return m.sd_normalized; });
    mean.sd_raw = detail::mean_defined(out.images, l, [](const MetricReport& m) { return double(m.sd_raw); });
    mean.sen = detail::mean_defined(out.images, l, [](const MetricReport& m) { return m.sen; });
    mean.spe = detail::mean_defined(out.images, l, [](const MetricReport& m) { return m.spe; });
    mean.ppv = detail::mean_defined(out.images, l, [](const MetricReport& m) { return m.ppv; });
    mean.fscore = detail::mean_defined(out.images, l, [](const MetricReport& m) { return m.fscore; });
    mean.rand_index = detail::mean_defined(out.images, l, [](const MetricReport& m) { return m.rand_index; });
    out.mean_rows.push_back(mean);
    out.pooled_rows.push_back(
        detail::to_row(level, n, evaluate(pooled[l]), static_cast<double>(symmetric_difference_raw(pooled[l]))));
  }
  out.pooled_roc = roc_from_counts(pooled);
  return out;
}

/// Level of the row with the highest F-score (lowest level on ties).
inline int best_level(const std::vector<AggregateRow>& rows) {
  detail::require(!rows.empty(), Errc::invalid_argument, "no aggregate rows");
  const AggregateRow* best = &rows.front();
  for (const auto& r : rows) {
    if (std::isnan(best->fscore) || (!std::isnan(r.fscore) && r.fscore > best->fscore)) best = &r;
  }
  return best->level;
}

// ---- CSV output -----------------------------------------------------------

inline constexpr const char* kTableHeader = "level,SD_norm,SD_raw,SEN,SPE,PPV,FSCORE,RI,images";

namespace detail {

inline std::string fmt(double v, int precision = 6) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

inline std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_failure, "cannot write " + path.string());
  return out;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) fail(Errc::io_failure, "cannot create output directory " + dir.string());
}

}  // namespace detail

inline std::string format_row(const AggregateRow& r) {
  using detail::fmt;
  return std::to_string(r.level) + "," + fmt(r.sd_normalized) + "," + fmt(r.sd_raw, 2) + "," + fmt(r.sen) + "," +
         fmt(r.spe) + "," + fmt(r.ppv) + "," + fmt(r.fscore) + "," + fmt(r.rand_index) + "," +
         std::to_string(r.image_count);
}

inline std::string format_table(const std::vector<AggregateRow>& rows) {
  std::string s = std::string(kTableHeader) + "\n";
  for (const auto& r : rows) s += format_row(r) + "\n";
  return s;
}

/// Writes per_image.csv, table_mean.csv and table_pooled.csv into `dir`.
inline void write_batch_csv(const BatchResult& result, const std::vector<int>& levels, const fs::path& dir) {
  detail::ensure_dir(dir);
  {
    auto out = detail::open_for_write(dir / "per_image.csv");
    out << "image,level,SD_norm,SD_raw,SEN,SPE,PPV,FSCORE,RI,n00,n01,n10,n11\n";
    for (const auto& img : result.images) {
      for (const int level : levels) {
        const auto l = static_cast<std::size_t>(level);
        const auto& m = img.metrics[l];
        const auto& c = img.counts[l];
        using detail::fmt;
        out << img.image.filename().string() << "," << level << "," << fmt(m.sd_normalized) << "," << m.sd_raw << ","
            << fmt(m.sen) << "," << fmt(m.spe) << "," << fmt(m.ppv) << "," << fmt(m.fscore) << ","
            << fmt(m.rand_index) << "," << c.n00 << "," << c.n01 << "," << c.n10 << "," << c.n11 << "\n";
      }
    }
  }
  detail::open_for_write(dir / "table_mean.csv") << format_table(result.mean_rows);
  detail::open_for_write(dir / "table_pooled.csv") << format_table(result.pooled_rows);
}

inline std::string format_roc(const RocCurve& curve) {
  std::string s = "level,fpr,tpr\n";
  for (int l = 0; l <= kMaxLevel; ++l) {
    const auto& p = curve.levels[static_cast<std::size_t>(l)];
    s += std::to_string(l) + "," + detail::fmt(p.fpr) + "," + detail::fmt(p.tpr) + "\n";
  }
  s += "auc," + detail::fmt(curve.auc) + ",\n";
  return s;
}

/// Writes roc_pooled.csv, auc.csv and roc/<stem>.csv for every image.
inline void write_roc_csv(const BatchResult& result, const fs::path& dir) {
  detail::ensure_dir(dir / "roc");
  auto auc = detail::open_for_write(dir / "auc.csv");
  auc << "image,auc\n";
  for (const auto& img : result.images) {
    auc << img.image.filename().string() << "," << (img.roc ? detail::fmt(img.roc->auc) : "nan") << "\n";
    if (img.roc) detail::open_for_write(dir / "roc" / (img.image.stem().string() + ".csv")) << format_roc(*img.roc);
  }
  auc << "pooled," << (result.pooled_roc ? detail::fmt(result.pooled_roc->auc) : "nan") << "\n";
  if (result.pooled_roc) detail::open_for_write(dir / "roc_pooled.csv") << format_roc(*result.pooled_roc);
}

/// Runs the batch and writes its ROC outputs.
inline BatchResult emit_roc(const RunConfig& config) {
  BatchResult r = run_batch(config);
  write_roc_csv(r, config.output_dir);
  return r;
}

}  // namespace mrfseg
