// mrfseg: command-line front end for ensemble MRF segmentation and evaluation.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "mrfseg/mrfseg.hpp"

namespace {

using namespace mrfseg;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Options {
  RunConfig run;
  int level = 3;
  bool dump_members = false;
  std::string mask_dir;
  std::vector<std::string> positional;
};

void print_report(const MetricReport& m, const ConfusionCounts& c) {
  std::cout << "SD_norm,SD_raw,SEN,SPE,PPV,FSCORE,RI\n";
  using detail::fmt;
  std::cout << fmt(m.sd_normalized) << "," << m.sd_raw << "," << fmt(m.sen) << "," << fmt(m.spe) << ","
            << fmt(m.ppv) << "," << fmt(m.fscore) << "," << fmt(m.rand_index) << "\n\n";
  std::printf("  pixels            %llu\n", static_cast<unsigned long long>(c.total()));
  std::printf("  n00 n01 n10 n11   %llu %llu %llu %llu\n", static_cast<unsigned long long>(c.n00),
              static_cast<unsigned long long>(c.n01), static_cast<unsigned long long>(c.n10),
              static_cast<unsigned long long>(c.n11));
  std::printf("  sym. difference   %s (raw %llu)\n", fmt(m.sd_normalized, 4).c_str(),
              static_cast<unsigned long long>(m.sd_raw));
  std::printf("  sensitivity       %s\n", fmt(m.sen, 4).c_str());
  std::printf("  specificity       %s\n", fmt(m.spe, 4).c_str());
  std::printf("  PPV               %s\n", fmt(m.ppv, 4).c_str());
  std::printf("  F-score           %s\n", fmt(m.fscore, 4).c_str());
  std::printf("  Rand index        %s\n", fmt(m.rand_index, 4).c_str());
}

void print_table(const std::vector<AggregateRow>& rows, const char* title) {
  std::printf("%s\n", title);
  std::printf("%5s %9s %12s %7s %7s %7s %7s %7s\n", "level", "SD_norm", "SD_raw", "SEN", "SPE", "PPV", "FSCORE",
              "RI");
  for (const auto& r : rows) {
    std::printf("%5d %9.5f %12.1f %7.3f %7.3f %7.3f %7.3f %7.3f\n", r.level, r.sd_normalized, r.sd_raw, r.sen, r.spe,
                r.ppv, r.fscore, r.rand_index);
  }
}

int cmd_segment(const Options& o) {
  const fs::path input = o.positional.at(0);
  const GrayImage image = load_gray(input);
  const EnsembleResult r = segment_ensemble(image, o.run.ensemble);
  const fs::path out = o.run.output_dir;
  detail::ensure_dir(out);
  const std::string stem = input.stem().string();
  save_gray(confidence_to_image(r.votes), out / (stem + "_probability.png"));
  save_mask(threshold_confidence(r.votes, o.level), out / (stem + "_level" + std::to_string(o.level) + ".png"));
  if (o.dump_members) {
    for (std::size_t j = 0; j < r.members.size(); ++j)
      save_mask(r.members[j], out / (stem + "_member" + std::to_string(j) + ".png"));
  }
  for (std::size_t j = 0; j < r.reports.size(); ++j) {
    const auto& rep = r.reports[j];
    std::printf("member %zu: energy %.3f, %zu sweeps%s\n", j, rep.final_energy, rep.sweeps,
                rep.converged ? ", converged" : "");
  }
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

int cmd_slice(const Options& o) {
  const fs::path input = o.positional.at(0);
  const BitPlaneSet set = slice(load_gray(input));
  const fs::path out = o.run.output_dir;
  detail::ensure_dir(out);
  for (std::size_t j = 0; j < set.planes.size(); ++j)
    save_mask(set.planes[j], out / (input.stem().string() + "_plane" + std::to_string(j) + ".png"));
  std::printf("wrote %s\n", out.string().c_str());
  return 0;
}

int cmd_evaluate(const Options& o) {
  const BinaryMask seg = load_mask(o.positional.at(0), 1);
  const BinaryMask gt = load_mask(o.positional.at(1), o.run.mask_threshold);
  const ConfusionCounts c = confusion(seg, gt);
  print_report(evaluate(c), c);
  return 0;
}

void warn_skipped(const BatchResult& r) {
  for (const auto& p : r.skipped) std::cerr << "warning: no mask for " << p.string() << ", skipped\n";
}

int cmd_batch(const Options& o) {
  const BatchResult r = run_batch(o.run);
  warn_skipped(r);
  write_batch_csv(r, o.run.levels, o.run.output_dir);
  print_table(r.mean_rows, "mean over images");
  print_table(r.pooled_rows, "pooled confusion counts");
  const auto& primary = r.rows(o.run.aggregation);
  std::printf("best level (%s): %d, %zu images\n", o.run.aggregation == Aggregation::pooled ? "pooled" : "mean",
              best_level(primary), r.images.size());
  return 0;
}

int cmd_roc(const Options& o) {
  const fs::path target = o.positional.at(0);
  if (fs::is_directory(target)) {
    if (o.positional.size() > 1) throw Error(Errc::invalid_argument, "roc <dataset-dir> takes no second argument");
    const BatchResult r = emit_roc(o.run);
    warn_skipped(r);
    if (r.pooled_roc) std::cout << format_roc(*r.pooled_roc);
    else std::cout << "pooled ROC undefined: ground truth lacks one class\n";
    return 0;
  }
  if (o.positional.size() != 2) throw Error(Errc::invalid_argument, "roc <confidence.png> <gt.png>");
  const ConfidenceMap map = image_to_confidence(load_gray(target));
  const BinaryMask gt = load_mask(o.positional[1], o.run.mask_threshold);
  const auto curve = roc_from_confidence(map, gt);
  if (!curve) throw Error(Errc::empty_dataset, "ROC undefined: ground truth lacks one class");
  std::cout << format_roc(*curve);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised bit-plane ensemble MRF segmentation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file with option defaults; flags override it");

  Options o;
  EnsembleConfig& ens = o.run.ensemble;
  int neighborhood = 4;
  std::string optimizer = "icm";
  std::string polarity = "bright";
  std::string aggregation = "mean";
  std::size_t threads = 1;

  app.add_option("--beta", ens.beta, "pair coupling strength")
      ->check(CLI::Range(0.0, 10.0))
      ->check(CLI::Validator([](std::string& s) { return std::stod(s) > 0.0 ? "" : "beta must be > 0"; }, "BETA>0"));
  app.add_option("--neighborhood", neighborhood, "4 or 8 connectivity")->check(CLI::IsMember({4, 8}));
  app.add_option("--optimizer", optimizer, "icm or sa")->check(CLI::IsMember({"icm", "sa"}));
  app.add_option("--max-sweeps", ens.max_sweeps, "ICM sweep limit")->check(CLI::PositiveNumber);
  app.add_option("--sa-t0", ens.schedule.t0, "SA initial temperature")->check(CLI::PositiveNumber);
  app.add_option("--sa-cooling", ens.schedule.cooling, "SA geometric cooling factor")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--sa-tmin", ens.schedule.t_min, "SA stopping temperature")->check(CLI::PositiveNumber);
  app.add_option("--seed", ens.schedule.seed, "SA seed (member j uses seed + j)");
  app.add_flag("--reestimate", ens.reestimate, "refresh class parameters after every sweep");
  app.add_option("--polarity", polarity, "object class: bright or dark")->check(CLI::IsMember({"bright", "dark"}));
  app.add_option("--out", o.run.output_dir, "output directory");
  app.add_option("--level", o.level, "confidence level for the output mask")->check(CLI::Range(0, kMaxLevel));
  app.add_option("--levels", o.run.levels, "levels reported by batch")->check(CLI::Range(0, kMaxLevel));
  app.add_option("--mask-suffix", o.run.mask_suffix, "ground-truth file suffix before .png");
  app.add_option("--mask-dir", o.mask_dir, "directory holding ground-truth masks");
  app.add_option("--image-glob", o.run.image_glob, "pattern selecting dataset images");
  app.add_option("--mask-threshold", o.run.mask_threshold, "ground-truth foreground threshold")
      ->check(CLI::Range(1, 255));
  app.add_option("--aggregation", aggregation, "table used for the best-level summary: mean or pooled")
      ->check(CLI::IsMember({"mean", "pooled"}));
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* segment = app.add_subcommand("segment", "segment one image and write probability map and mask");
  segment->add_option("image", o.positional)->required()->expected(1);
  segment->add_flag("--dump-members", o.dump_members, "also write the 8 member segmentations");
  auto* slice_cmd = app.add_subcommand("slice", "write the 8 bit planes of an image");
  slice_cmd->add_option("image", o.positional)->required()->expected(1);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "compare a segmentation mask with ground truth");
  evaluate_cmd->add_option("files", o.positional, "<seg> <gt>")->required()->expected(2);
  auto* batch = app.add_subcommand("batch", "evaluate every image of a dataset directory");
  batch->add_option("dataset", o.positional)->required()->expected(1);
  auto* roc = app.add_subcommand("roc", "ROC of a dataset, or of one probability map against ground truth");
  roc->add_option("inputs", o.positional, "<dataset-dir> | <probability.png> <gt.png>")->required()->expected(1, 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  ens.neighborhood = neighborhood == 8 ? Neighborhood::eight : Neighborhood::four;
  ens.optimizer = optimizer == "sa" ? Optimizer::sa : Optimizer::icm;
  ens.polarity = polarity == "dark" ? Polarity::dark : Polarity::bright;
  ens.threads = threads;
  o.run.threads = 1;
  o.run.aggregation = aggregation == "pooled" ? Aggregation::pooled : Aggregation::mean;
  if (!o.mask_dir.empty()) o.run.mask_dir = fs::path(o.mask_dir);

  try {
    if (ens.optimizer == Optimizer::sa) ens.schedule.validate();
    if (*segment) return cmd_segment(o);
    if (*slice_cmd) return cmd_slice(o);
    if (*evaluate_cmd) return cmd_evaluate(o);
    if (*batch) {
      o.run.dataset_dir = o.positional.at(0);
      return cmd_batch(o);
    }
    if (*roc) {
      o.run.dataset_dir = o.positional.at(0);
      return cmd_roc(o);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::invalid_argument ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
