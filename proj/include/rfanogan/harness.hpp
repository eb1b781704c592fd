#pragma once

// Experiment orchestration: per-modulation f-AnoGAN and CAE training, AUROC
// evaluation, run persistence, reports and the latency benchmark.

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfanogan/metrics.hpp"
#include "rfanogan/network.hpp"
#include "rfanogan/rfdata.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::harness {

struct SplitParams {
  double train_frac = rfdata::kDefaultTrainFraction;
  int snr_min = rfdata::kDefaultSnrMin;
  std::uint64_t seed = 0;
  rfdata::NormalizationPolicy normalization = rfdata::NormalizationPolicy::none;
};

struct ExperimentOptions {
  training::TrainingConfig cfg;
  std::filesystem::path dataset;
  rfdata::DatasetFormat format = rfdata::DatasetFormat::neutral_container;
  // Empty: every modulation in the dataset, in dataset order.
  std::vector<std::string> modulations;
  // Empty: the config's selection measure only.
  std::vector<metrics::FidelityMeasure> measures;
  SplitParams split;
  training::FeatureSpace feature_space = training::FeatureSpace::raw;
  bool run_cae = true;
  // Empty: "run-<UTC timestamp>".
  std::string run_id;
  // Empty: $RFANOGAN_RUNS_DIR, else "runs".
  std::filesystem::path runs_root;
  // Latency benchmark on the first successful modulation; 0 disables it.
  std::size_t bench_samples = 0;
  std::size_t bench_warmup = 0;
  std::function<void(std::string_view)> log;
};

struct Timing {
  double mean_latency_s = 0.0;
  double throughput = 0.0;  // samples per second
  std::size_t n_timed = 0;
  std::string hardware;
};

struct ModulationResult {
  std::string modulation;
  bool failed = false;
  std::string failed_stage;
  std::string error;

  std::map<metrics::FidelityMeasure, double> auroc_fanogan;
  std::map<metrics::FidelityMeasure, int> selected_epoch;
  std::map<metrics::FidelityMeasure, metrics::RocResult> roc_fanogan;
  std::optional<double> auroc_cae;
  std::optional<metrics::RocResult> roc_cae;
  double cae_threshold = 0.0;

  std::size_t n_train = 0;
  std::size_t n_test_inlier = 0;
  std::size_t n_test_outlier = 0;
  std::vector<int> checkpoint_epochs;
  std::vector<training::EpochStats> epochs;
};

struct ExperimentRecord {
  std::string run_id;
  training::TrainingConfig cfg;
  SplitParams split;
  std::vector<metrics::FidelityMeasure> measures;
  training::FeatureSpace feature_space = training::FeatureSpace::raw;
  bool run_cae = true;
  std::filesystem::path dataset;
  rfdata::DatasetFormat format = rfdata::DatasetFormat::neutral_container;
  std::string dataset_sha256;
  std::vector<ModulationResult> per_modulation;
  std::optional<Timing> timing;
  std::filesystem::path run_dir;

  bool any_failed() const;
};

std::filesystem::path runs_root(const std::filesystem::path& requested = {});

// Trains and evaluates every requested modulation under <runs_root>/<run_id>/
// and writes the report there. Throws "run exists" if the run directory is
// already present; per-modulation failures are recorded, not thrown.
ExperimentRecord run_experiment(const ExperimentOptions& options);

// Re-scores a finished run from its manifest and stored parameters.
ExperimentRecord evaluate_run(const std::filesystem::path& run_dir);

// record.json, auroc_table.csv, roc/<modulation>_<column>.csv, manifest.json.
void report(const ExperimentRecord& record, const std::filesystem::path& out_dir);
ExperimentRecord read_record(const std::filesystem::path& record_json);

// modulation column per measure, CAE column, then an "average" row over the
// non-failed rows (absent when there are no rows).
std::string auroc_table_csv(const ExperimentRecord& record);

std::string hardware_description();

// Times n_samples single-frame f-AnoGAN scoring passes, discarding the first
// `warmup`. Frames are reused cyclically.
Timing benchmark_inference(models::Network& generator, models::Network& encoder, models::Network& critic,
                           const torch::Tensor& frames, std::size_t n_samples, std::size_t warmup,
                           double kappa = 1.0);

}  // namespace rfanogan::harness
