// Command-line driver: run, fuse, metrics, split.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage, 3 validation,
// 4 data (I/O, parse, coverage), 5 runtime (training/evaluation).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "ensemble/dataset.hpp"
#include "ensemble/error.hpp"
#include "ensemble/harness.hpp"
#include "ensemble/metrics.hpp"
#include "ensemble/predictions.hpp"
#include "ensemble/report.hpp"

namespace fs = std::filesystem;
using namespace ensemble;

namespace {

enum Exit : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kValidation = 3,
  kData = 4,
  kRuntime = 5,
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return kUsage;
    case ErrorKind::Validation: return kValidation;
    case ErrorKind::Data: return kData;
    case ErrorKind::Runtime: return kRuntime;
  }
  return kUnexpected;
}

const char* kind_label(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Runtime: return "runtime error";
  }
  return "error";
}

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string out;
  bool quiet = false;
};

struct PlanOptions {
  int iterations = 5;
  double train_fraction = 0.8;
  std::string splits_file;
};

fs::path output_dir(const GlobalOptions& g) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("ENSEMBLE_OUT_DIR"); env && *env) return env;
  return "ensemble-out";
}

ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "table") return ReportFormat::Table;
  return ReportFormat::Both;
}

SplitPlan plan_for(const DatasetManifest& m, const PlanOptions& p, std::uint64_t seed) {
  if (!p.splits_file.empty()) return load_split_plan(p.splits_file);
  return make_splits(m, SplitParams{p.iterations, p.train_fraction}, seed);
}

void add_plan_options(CLI::App* cmd, PlanOptions& p) {
  cmd->add_option("--iterations", p.iterations, "Number of random train/test splits")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--train-fraction", p.train_fraction, "Share of images used for training")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--splits", p.splits_file, "Reuse a split plan written by 'split'")
      ->check(CLI::ExistingFile);
}

void print_metric(const char* name, const std::optional<double>& v) {
  if (v) {
    fmt::print("  {:<12} {:.6f}\n", name, *v);
  } else {
    fmt::print("  {:<12} undefined\n", name);
  }
}

int cmd_metrics(const fs::path& truth_path, const std::vector<fs::path>& pred_paths,
                const std::string& model_filter, std::optional<std::size_t> iteration,
                ClassLabel positive) {
  const DatasetManifest truth = load_truth(truth_path);
  truth.codebook.check(positive);
  const auto records = read_predictions(pred_paths, truth.codebook);

  std::vector<std::string> models;
  std::map<std::string, std::vector<const PredictionRecord*>> by_model;
  for (const auto& r : records) {
    if (!model_filter.empty() && r.model_id != model_filter) continue;
    if (iteration && r.iteration && *r.iteration != *iteration) continue;
    if (!by_model.count(r.model_id)) models.push_back(r.model_id);
    by_model[r.model_id].push_back(&r);
  }
  if (models.empty()) throw CoverageError("no prediction records match the selection");

  for (const auto& model : models) {
    std::vector<ClassLabel> t, p;
    std::vector<double> s;
    std::map<std::string, int> seen;
    for (const auto* r : by_model[model]) {
      if (++seen[r->image_id] > 1) {
        throw UsageError("model '" + model + "' has several records for image '" +
                         r->image_id + "'; select one with --iteration");
      }
      t.push_back(truth.find(r->image_id).label);
      p.push_back(r->decision);
      s.push_back(positive_score(r->decision, r->score, positive));
    }
    const ConfusionCounts c = confusion(t, p, positive);
    MetricSet ms = metric_set(c);
    if (truth.codebook.is_binary()) {
      try {
        ms.auc = roc_and_auc(t, s, positive).auc;
      } catch (const DegenerateRocError&) {
      }
    }
    fmt::print("model {} (n={})\n", model, t.size());
    fmt::print("  TP={} FP={} TN={} FN={}\n", c.tp, c.fp, c.tn, c.fn);
    print_metric("accuracy", ms.accuracy);
    print_metric("sensitivity", ms.sensitivity);
    print_metric("specificity", ms.specificity);
    print_metric("f1", ms.f1);
    print_metric("auc", ms.auc);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode-based ensemble fusion and evaluation"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for splits, training and augmentation");
  app.add_option("--out", global.out, "Output directory (default $ENSEMBLE_OUT_DIR or ./ensemble-out)");
  app.add_flag("--quiet", global.quiet, "Do not print the report table");
  app.fallthrough();

  // run
  auto* run = app.add_subcommand("run", "Train the built-in committee and evaluate it");
  std::string run_manifest, committee, committee_file, debug_png, run_format = "both";
  PlanOptions run_plan;
  bool augment = false, export_predictions = false;
  int input_size = 0;
  int run_positive = -1;
  run->add_option("--manifest", run_manifest, "Dataset manifest (image_id,path,label)")->required();
  add_plan_options(run, run_plan);
  run->add_flag("--augment", augment, "Augment training images");
  run->add_option("--committee", committee,
                  "Preset 'augmented' | 'plain' or member list like A,B,C (default follows --augment)");
  run->add_option("--committee-file", committee_file, "JSON committee definition")
      ->check(CLI::ExistingFile);
  run->add_option("--input-size", input_size, "Normalized image side in pixels (default 224)");
  run->add_option("--positive", run_positive, "Label treated as positive");
  run->add_flag("--export-predictions", export_predictions, "Write predictions.csv");
  run->add_option("--debug-png", debug_png, "Write first-iteration augmented images here");
  run->add_option("--format", run_format, "json | table | both")
      ->check(CLI::IsMember({"json", "table", "both"}));

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse external prediction files and evaluate");
  std::string fuse_truth, fuse_format = "both";
  std::vector<std::string> fuse_predictions;
  PlanOptions fuse_plan;
  int fuse_positive = -1;
  fuse_cmd->add_option("--manifest", fuse_truth, "Manifest or truth file (image_id,label)")
      ->required();
  fuse_cmd->add_option("--predictions", fuse_predictions, "Prediction files")->required();
  add_plan_options(fuse_cmd, fuse_plan);
  fuse_cmd->add_option("--positive", fuse_positive, "Label treated as positive");
  fuse_cmd->add_option("--format", fuse_format, "json | table | both")
      ->check(CLI::IsMember({"json", "table", "both"}));

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Recompute metrics for prediction files");
  std::string metrics_truth, model_filter;
  std::vector<std::string> metrics_predictions;
  std::optional<std::size_t> metrics_iteration;
  int metrics_positive = -1;
  metrics->add_option("--truth", metrics_truth, "Manifest or truth file")->required();
  metrics->add_option("--predictions", metrics_predictions, "Prediction files")->required();
  metrics->add_option("--model", model_filter, "Only this model id");
  metrics->add_option("--iteration", metrics_iteration, "Only records of this iteration");
  metrics->add_option("--positive", metrics_positive, "Label treated as positive");

  // split
  auto* split = app.add_subcommand("split", "Write a split plan for external trainers");
  std::string split_manifest;
  PlanOptions split_plan;
  split->add_option("--manifest", split_manifest, "Dataset manifest")->required();
  split->add_option("--iterations", split_plan.iterations, "Number of splits")
      ->check(CLI::PositiveNumber);
  split->add_option("--train-fraction", split_plan.train_fraction, "Training share")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const fs::path out = output_dir(global);
    if (run->parsed()) {
      const DatasetManifest m = load_manifest(run_manifest);
      const SplitPlan plan = plan_for(m, run_plan, global.seed);
      CommitteeConfig c = !committee_file.empty()
                              ? load_committee(committee_file)
                              : committee_preset(!committee.empty() ? committee
                                                 : augment          ? "augmented"
                                                                    : "plain");
      if (input_size > 0) c.input_side = input_size;
      RunOptions opts;
      opts.positive = ClassLabel{run_positive};
      opts.augment = augment;
      if (!debug_png.empty()) opts.debug_png_dir = fs::path(debug_png);
      const InternalRun result = run_internal(m, plan, c, opts);
      emit_report(result.report, out, parse_format(run_format));
      save_split_plan(out / "splits.json", plan);
      if (export_predictions) write_predictions(out / "predictions.csv", result.predictions);
      if (!global.quiet) std::cout << render_table(result.report);
    } else if (fuse_cmd->parsed()) {
      const DatasetManifest m = load_truth(fuse_truth);
      const SplitPlan plan = plan_for(m, fuse_plan, global.seed);
      const std::vector<fs::path> paths(fuse_predictions.begin(), fuse_predictions.end());
      const auto records = read_predictions(paths, m.codebook);
      RunOptions opts;
      opts.positive = ClassLabel{fuse_positive};
      const EvalReport report = run_external(m, plan, records, opts);
      emit_report(report, out, parse_format(fuse_format));
      if (!global.quiet) std::cout << render_table(report);
    } else if (metrics->parsed()) {
      const std::vector<fs::path> paths(metrics_predictions.begin(), metrics_predictions.end());
      return cmd_metrics(metrics_truth, paths, model_filter, metrics_iteration,
                         ClassLabel{metrics_positive});
    } else if (split->parsed()) {
      const DatasetManifest m = load_manifest(split_manifest);
      const SplitPlan plan = make_splits(m, SplitParams{split_plan.iterations,
                                                        split_plan.train_fraction},
                                         global.seed);
      fs::create_directories(out);
      save_split_plan(out / "splits.json", plan);
      if (!global.quiet) std::cout << (out / "splits.json").string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "ensemble: " << kind_label(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ensemble: data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "ensemble: " << e.what() << "\n";
    return kUnexpected;
  }
  return kOk;
}
