// rfanogan command-line front end.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>

#include "../src/harness/internal.hpp"
#include "rfanogan/anomaly.hpp"
#include "rfanogan/error.hpp"
#include "rfanogan/harness.hpp"
#include "rfanogan/hashing.hpp"

namespace fs = std::filesystem;
using namespace rfanogan;

namespace {

struct Common {
  std::string dataset;
  std::string format = "neutral-container";
  std::string inlier;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> measures;
  std::string out;
  std::string config;
};

void add_dataset_flags(CLI::App* app, Common& c) {
  app->add_option("--dataset", c.dataset, "Dataset file")->required();
  app->add_option("--dataset-format", c.format, "public-serialized-map | neutral-container");
}

void add_training_flags(CLI::App* app, Common& c) {
  app->add_option("--epochs", c.epochs, "GAN, encoder and CAE epochs");
  app->add_option("--seed", c.seed, "Training and split seed");
  app->add_option("--measure", c.measures, "Selection measure(s): S-RP H-RP S-DC H-DC JSD")->delimiter(',');
  app->add_option("--config", c.config, "key=value file overriding training defaults");
}

training::TrainingConfig build_config(const Common& c) {
  training::TrainingConfig cfg;
  if (!c.config.empty()) cfg = training::load_config(c.config);
  if (c.epochs) cfg.epochs = *c.epochs;
  if (c.seed) cfg.seed = *c.seed;
  if (!c.measures.empty()) cfg.selection_measure = metrics::parse_measure(c.measures.front());
  cfg.validate();
  return cfg;
}

std::vector<metrics::FidelityMeasure> parse_measures(const std::vector<std::string>& names) {
  std::vector<metrics::FidelityMeasure> out;
  for (const auto& n : names) out.push_back(metrics::parse_measure(n));
  return out;
}

int print_record(const harness::ExperimentRecord& record) {
  std::cout << harness::auroc_table_csv(record);
  for (const auto& r : record.per_modulation) {
    if (r.failed) std::cerr << r.modulation << " failed at " << r.failed_stage << ": " << r.error << '\n';
  }
  if (record.timing) {
    std::cout << "mean latency " << record.timing->mean_latency_s << " s, " << record.timing->throughput
              << " samples/s (" << record.timing->hardware << ")\n";
  }
  std::cout << "run directory: " << record.run_dir.string() << '\n';
  return record.any_failed() ? 2 : 0;
}

struct RunFlags {
  std::string run_id;
  std::string split_normalization = "none";
  double train_frac = rfdata::kDefaultTrainFraction;
  int snr_min = rfdata::kDefaultSnrMin;
  std::string feature_space = "raw";
  bool no_cae = false;
  std::size_t bench = 0;
  std::size_t bench_warmup = 0;
};

void add_run_flags(CLI::App* app, RunFlags& f, Common& c) {
  app->add_option("--out", c.out, "Runs root (default $RFANOGAN_RUNS_DIR or ./runs)");
  app->add_option("--run-id", f.run_id, "Run identifier (default: UTC timestamp)");
  app->add_option("--train-frac", f.train_frac, "Fraction of inliers used for training");
  app->add_option("--snr-min", f.snr_min, "Lowest SNR (dB) kept");
  app->add_option("--normalization", f.split_normalization, "none | max-abs | unit-power");
  app->add_option("--feature-space", f.feature_space, "Fidelity feature space: raw | critic");
  app->add_flag("--no-cae", f.no_cae, "Skip the autoencoder baseline");
  app->add_option("--bench", f.bench, "Latency benchmark sample count (0 = off)");
  app->add_option("--bench-warmup", f.bench_warmup, "Benchmark warmup samples");
}

harness::ExperimentOptions experiment_options(const Common& c, const RunFlags& f) {
  harness::ExperimentOptions o;
  o.cfg = build_config(c);
  o.dataset = c.dataset;
  o.format = rfdata::parse_dataset_format(c.format);
  o.measures = parse_measures(c.measures);
  o.split.train_frac = f.train_frac;
  o.split.snr_min = f.snr_min;
  o.split.seed = o.cfg.seed;
  o.split.normalization = rfdata::parse_normalization(f.split_normalization);
  o.feature_space = harness::detail::parse_feature_space(f.feature_space);
  o.run_cae = !f.no_cae;
  o.run_id = f.run_id;
  o.runs_root = c.out;
  o.bench_samples = f.bench;
  o.bench_warmup = f.bench_warmup;
  o.log = [](std::string_view msg) { std::cerr << msg << '\n'; };
  return o;
}

struct LoadedModels {
  models::Network generator{nullptr};
  models::Network critic{nullptr};
  models::Network encoder{nullptr};
};

LoadedModels load_selected(const fs::path& run_dir, const harness::ModulationResult& r,
                           metrics::FidelityMeasure measure, std::int64_t width) {
  const auto it = r.selected_epoch.find(measure);
  if (it == r.selected_epoch.end()) {
    throw Error("run has no checkpoint selected by " + std::string(metrics::to_string(measure)));
  }
  const auto dir = run_dir / r.modulation / "checkpoints" / ("epoch-" + std::to_string(it->second));
  LoadedModels m;
  m.generator = models::make_network(models::Role::generator, width);
  m.critic = models::make_network(models::Role::critic, width);
  m.encoder = models::make_network(models::Role::encoder, width);
  models::load_params(*m.generator, models::read_blob(dir / "generator.bin"));
  models::load_params(*m.critic, models::read_blob(dir / "critic.bin"));
  models::load_params(*m.encoder, models::read_blob(dir / "encoder.bin"));
  return m;
}

const harness::ModulationResult& find_modulation(const harness::ExperimentRecord& record, const std::string& mod) {
  for (const auto& r : record.per_modulation) {
    if (r.modulation == mod) {
      if (r.failed) throw Error("modulation " + mod + " failed in this run");
      return r;
    }
  }
  throw Error("run has no modulation " + mod);
}

harness::ExperimentRecord load_manifest(const fs::path& run_dir) {
  std::ifstream in(run_dir / "manifest.json");
  if (!in) throw Error("missing file: " + (run_dir / "manifest.json").string());
  return harness::detail::record_from_json(nlohmann::json::parse(in));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAN-based RF anomaly detection toolkit"};
  app.require_subcommand(1);
  Common c;

  auto* ingest = app.add_subcommand("ingest", "Convert a public pickle dataset to the neutral container");
  add_dataset_flags(ingest, c);
  ingest->add_option("--out", c.out, "Output container path")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::vector<std::string> classes{"tone", "wideband-noise"};
  std::size_t per_class = 1000;
  double snr = rfdata::SynthSpec{}.snr_db;
  std::size_t width = rfdata::kDefaultFrameWidth;
  std::uint64_t synth_seed = 0;
  synth->add_option("--classes", classes, "Waveform classes")->delimiter(',');
  synth->add_option("--frames-per-class", per_class, "Frames per class");
  synth->add_option("--snr", snr, "SNR in dB; inf disables the noise");
  synth->add_option("--width", width, "Frame width W");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", c.out, "Output container path")->required();

  RunFlags flags;
  auto* train = app.add_subcommand("train", "Train and evaluate one inlier modulation");
  add_dataset_flags(train, c);
  add_training_flags(train, c);
  add_run_flags(train, flags, c);
  train->add_option("--inlier", c.inlier, "Inlier modulation")->required();

  auto* sweep = app.add_subcommand("sweep", "Train and evaluate every modulation (the AUROC table)");
  std::vector<std::string> sweep_mods;
  add_dataset_flags(sweep, c);
  add_training_flags(sweep, c);
  add_run_flags(sweep, flags, c);
  sweep->add_option("--modulations", sweep_mods, "Subset of modulations")->delimiter(',');

  std::string run_dir;
  auto* score = app.add_subcommand("score", "Score a run's test split to CSV");
  std::optional<double> threshold;
  score->add_option("--run", run_dir, "Run directory")->required();
  score->add_option("--inlier", c.inlier, "Inlier modulation")->required();
  score->add_option("--measure", c.measures, "Checkpoint selection measure")->delimiter(',');
  score->add_option("--threshold", threshold, "Decision threshold (default: mean + std of training scores)");
  score->add_option("--out", c.out, "CSV path (default: stdout)");

  auto* bench = app.add_subcommand("bench", "Time single-frame f-AnoGAN scoring");
  std::size_t samples = 1000;
  std::size_t warmup = 50;
  bench->add_option("--run", run_dir, "Run directory")->required();
  bench->add_option("--inlier", c.inlier, "Inlier modulation")->required();
  bench->add_option("--measure", c.measures, "Checkpoint selection measure")->delimiter(',');
  bench->add_option("--samples", samples, "Samples including warmup");
  bench->add_option("--warmup", warmup, "Discarded leading samples");

  auto* rep = app.add_subcommand("report", "Write the report files of a run");
  bool reevaluate = false;
  rep->add_option("--run", run_dir, "Run directory")->required();
  rep->add_option("--out", c.out, "Output directory (default: the run directory)");
  rep->add_flag("--reevaluate", reevaluate, "Re-score from the manifest instead of reading record.json");

  CLI11_PARSE(app, argc, argv);

  try {
    training::use_deterministic_execution();

    if (*ingest) {
      const auto ds = rfdata::load_dataset(c.dataset, rfdata::parse_dataset_format(c.format));
      rfdata::write_container(ds, c.out);
      std::cout << ds.size() << " frames, " << ds.modulations().size() << " modulations, sha256 "
                << sha256_file(c.out) << '\n';
      return 0;
    }
    if (*synth) {
      rfdata::SynthSpec spec{classes, per_class, snr, width};
      const auto ds = rfdata::synth_dataset(spec, synth_seed);
      rfdata::write_container(ds, c.out);
      std::cout << ds.size() << " frames written to " << c.out << '\n';
      return 0;
    }
    if (*train || *sweep) {
      auto options = experiment_options(c, flags);
      if (*train) options.modulations = {c.inlier};
      if (*sweep) options.modulations = sweep_mods;
      return print_record(harness::run_experiment(options));
    }
    if (*rep) {
      const auto record = reevaluate ? harness::evaluate_run(run_dir) : harness::read_record(fs::path(run_dir) / "record.json");
      harness::report(record, c.out.empty() ? fs::path(run_dir) : fs::path(c.out));
      std::cout << harness::auroc_table_csv(record);
      return record.any_failed() ? 2 : 0;
    }

    const auto record = load_manifest(run_dir);
    const auto& r = find_modulation(record, c.inlier);
    const auto measure = c.measures.empty() ? record.measures.front() : metrics::parse_measure(c.measures.front());
    const auto dataset = rfdata::load_dataset(record.dataset, record.format);
    const auto p = harness::detail::prepare_split(dataset, r.modulation, record.split);
    auto m = load_selected(run_dir, r, measure, p.test.size(3));

    if (*bench) {
      const auto t = harness::benchmark_inference(m.generator, m.encoder, m.critic, p.test, samples, warmup,
                                                  record.cfg.kappa);
      std::cout << "mean latency " << t.mean_latency_s << " s, " << t.throughput << " samples/s over " << t.n_timed
                << " samples (" << t.hardware << ")\n";
      return 0;
    }

    // score
    const auto raw = anomaly::fanogan_scores(p.test, m.generator, m.encoder, m.critic, record.cfg.kappa);
    double tau = 0.0;
    if (threshold) {
      tau = *threshold;
    } else {
      const auto train_scores = anomaly::fanogan_scores(p.train, m.generator, m.encoder, m.critic, record.cfg.kappa);
      tau = training::reconstruction_threshold(train_scores);
    }
    const auto normalized = anomaly::normalize_scores(raw);
    std::vector<anomaly::ScoreRow> rows;
    for (std::size_t n = 0; n < raw.size(); ++n) {
      const auto d = anomaly::detect({raw[n], normalized.values[n]}, tau);
      rows.push_back({n, p.split.test[n].modulation, p.split.test[n].snr_db, raw[n], normalized.values[n], d.verdict});
    }
    if (c.out.empty()) {
      anomaly::write_score_csv(std::cout, rows);
    } else {
      std::ofstream out(c.out);
      if (!out) throw Error("cannot open for writing: " + c.out);
      anomaly::write_score_csv(out, rows);
    }
    if (normalized.degenerate) std::cerr << "warning: all scores equal, normalized scores are zero\n";
    std::cerr << "threshold " << tau << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
