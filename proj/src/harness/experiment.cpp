#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "internal.hpp"
#include "rfanogan/anomaly.hpp"
#include "rfanogan/error.hpp"
#include "rfanogan/hashing.hpp"

namespace rfanogan::harness {
namespace fs = std::filesystem;
using metrics::FidelityMeasure;

namespace detail {

PreparedSplit prepare_split(const rfdata::RFDataset& dataset, const std::string& modulation,
                            const SplitParams& params) {
  PreparedSplit p;
  p.split = rfdata::make_anomaly_split(dataset, modulation, params.train_frac, params.snr_min, params.seed);
  std::vector<rfdata::IQFrame> train;
  train.reserve(p.split.train.size());
  for (const auto& f : p.split.train) train.push_back(rfdata::normalize_frame(f, params.normalization));
  std::vector<rfdata::IQFrame> test;
  test.reserve(p.split.test.size());
  for (const auto& t : p.split.test) {
    test.push_back(rfdata::normalize_frame(t.frame, params.normalization));
    p.labels.push_back(t.outlier ? 1 : 0);
  }
  p.train = models::frames_to_tensor(train);
  p.test = models::frames_to_tensor(test);
  return p;
}

}  // namespace detail

namespace {

std::string timestamp_id() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << "run-" << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return out.str();
}

struct FanoganModels {
  models::Network generator{nullptr};
  models::Network critic{nullptr};
  models::Network encoder{nullptr};
};

FanoganModels load_checkpoint_models(const fs::path& dir, std::int64_t width) {
  FanoganModels m;
  m.generator = models::make_network(models::Role::generator, width);
  m.critic = models::make_network(models::Role::critic, width);
  m.encoder = models::make_network(models::Role::encoder, width);
  models::load_params(*m.generator, models::read_blob(dir / "generator.bin"));
  models::load_params(*m.critic, models::read_blob(dir / "critic.bin"));
  models::load_params(*m.encoder, models::read_blob(dir / "encoder.bin"));
  return m;
}

fs::path checkpoint_dir(const fs::path& mod_dir, int epoch) {
  return mod_dir / "checkpoints" / ("epoch-" + std::to_string(epoch));
}

class StageTracker {
 public:
  explicit StageTracker(ModulationResult& result) : result_(result) {}
  void enter(std::string name) { stage_ = std::move(name); }
  void fail(const std::string& what) {
    result_.failed = true;
    result_.failed_stage = stage_;
    result_.error = what;
  }

 private:
  ModulationResult& result_;
  std::string stage_;
};

void run_modulation(const ExperimentOptions& options, const ExperimentRecord& record,
                    const rfdata::RFDataset& dataset, ModulationResult& r, const fs::path& mod_dir,
                    std::optional<Timing>& timing) {
  const auto& cfg = options.cfg;
  auto say = [&](const std::string& msg) {
    if (options.log) options.log(r.modulation + ": " + msg);
  };
  StageTracker stage(r);
  try {
    stage.enter("split");
    const auto p = detail::prepare_split(dataset, r.modulation, record.split);
    r.n_train = p.split.train.size();
    r.n_test_inlier = p.split.test_inlier_count();
    r.n_test_outlier = p.split.test_outlier_count();
    const std::int64_t width = p.train.size(3);
    say("train " + std::to_string(r.n_train) + ", test " + std::to_string(r.n_test_inlier) + " inliers / " +
        std::to_string(r.n_test_outlier) + " outliers");

    stage.enter("train_wgan_gp");
    training::WganOptions wopts;
    wopts.tracked = record.measures;
    wopts.feature_space = record.feature_space;
    wopts.checkpoint_dir = mod_dir / "checkpoints";
    wopts.on_epoch = [&](const training::EpochStats& s) {
      if (s.epoch == 1 || s.epoch % cfg.eval_every == 0 || s.epoch == cfg.epochs) {
        std::ostringstream msg;
        msg << "epoch " << s.epoch << " W=" << s.wasserstein << " critic=" << s.critic_loss
            << " gp=" << s.gradient_penalty << " gen=" << s.generator_loss;
        say(msg.str());
      }
    };
    auto gan = training::train_wgan_gp(p.train, cfg, wopts);
    r.epochs = gan.epochs;
    for (const auto& c : gan.history) r.checkpoint_epochs.push_back(c.epoch);

    std::map<int, FanoganModels> trained;
    for (const auto measure : record.measures) {
      stage.enter("select_checkpoint");
      const auto& chosen = training::select_checkpoint(gan.history, measure);
      r.selected_epoch[measure] = chosen.epoch;

      auto it = trained.find(chosen.epoch);
      if (it == trained.end()) {
        stage.enter("train_encoder");
        say("training encoder for epoch " + std::to_string(chosen.epoch));
        FanoganModels m;
        m.generator = models::make_network(models::Role::generator, width);
        m.critic = models::make_network(models::Role::critic, width);
        models::load_params(*m.generator, training::generator_blob(chosen));
        models::load_params(*m.critic, training::critic_blob(chosen));
        torch::manual_seed(cfg.seed);
        auto encoder = models::make_network(models::Role::encoder, width);
        auto enc = training::train_encoder(m.generator, m.critic, encoder, p.train, cfg);
        m.encoder = enc.encoder;
        models::write_blob(chosen.path / "encoder.bin", models::save_params(*m.encoder));
        it = trained.emplace(chosen.epoch, std::move(m)).first;
      }

      stage.enter("score");
      auto& m = it->second;
      const auto scores = anomaly::fanogan_scores(p.test, m.generator, m.encoder, m.critic, cfg.kappa);
      stage.enter("auroc");
      auto roc = metrics::auroc(scores, p.labels);
      r.auroc_fanogan[measure] = roc.auroc;
      say(std::string(metrics::to_string(measure)) + " AUROC " + std::to_string(roc.auroc));
      r.roc_fanogan[measure] = std::move(roc);
    }

    if (options.bench_samples > 0 && !timing && !trained.empty()) {
      stage.enter("benchmark");
      auto& m = trained.begin()->second;
      timing = benchmark_inference(m.generator, m.encoder, m.critic, p.test, options.bench_samples,
                                   options.bench_warmup, cfg.kappa);
    }

    if (record.run_cae) {
      stage.enter("train_cae");
      auto cae = training::train_cae(p.train, cfg);
      r.cae_threshold = cae.threshold;
      models::write_blob(mod_dir / "cae.bin", models::save_params(*cae.network));
      stage.enter("score_cae");
      const auto errors = training::reconstruction_errors(cae.network, p.test);
      stage.enter("auroc_cae");
      auto roc = metrics::auroc(errors, p.labels);
      r.auroc_cae = roc.auroc;
      say("CAE AUROC " + std::to_string(roc.auroc));
      r.roc_cae = std::move(roc);
    }
  } catch (const std::exception& e) {
    stage.fail(e.what());
    say("failed: " + r.error);
  }
}

}  // namespace

bool ExperimentRecord::any_failed() const {
  for (const auto& m : per_modulation) {
    if (m.failed) return true;
  }
  return false;
}

fs::path runs_root(const fs::path& requested) {
  if (!requested.empty()) return requested;
  if (const char* env = std::getenv("RFANOGAN_RUNS_DIR"); env != nullptr && *env != '\0') return env;
  return "runs";
}

ExperimentRecord run_experiment(const ExperimentOptions& options) {
  options.cfg.validate();
  ExperimentRecord record;
  record.run_id = options.run_id.empty() ? timestamp_id() : options.run_id;
  record.cfg = options.cfg;
  record.split = options.split;
  record.measures = options.measures;
  if (record.measures.empty()) record.measures.push_back(options.cfg.selection_measure);
  record.feature_space = options.feature_space;
  record.run_cae = options.run_cae;
  record.dataset = fs::absolute(options.dataset);
  record.format = options.format;

  const auto dataset = rfdata::load_dataset(options.dataset, options.format);
  record.dataset_sha256 = sha256_file(options.dataset);

  std::vector<std::string> modulations = options.modulations;
  if (modulations.empty()) modulations = dataset.modulations();

  record.run_dir = runs_root(options.runs_root) / record.run_id;
  if (fs::exists(record.run_dir)) throw Error("run exists: " + record.run_dir.string());
  fs::create_directories(record.run_dir);

  for (const auto& mod : modulations) {
    ModulationResult r;
    r.modulation = mod;
    run_modulation(options, record, dataset, r, record.run_dir / mod, record.timing);
    record.per_modulation.push_back(std::move(r));
  }
  report(record, record.run_dir);
  return record;
}

ExperimentRecord evaluate_run(const fs::path& run_dir) {
  std::ifstream in(run_dir / "manifest.json");
  if (!in) throw Error("missing file: " + (run_dir / "manifest.json").string());
  const auto manifest = nlohmann::json::parse(in);

  ExperimentRecord record = detail::record_from_json(manifest);
  record.run_dir = run_dir;
  const auto sha = sha256_file(record.dataset);
  if (sha != record.dataset_sha256) throw Error("dataset changed since the run: " + record.dataset.string());
  const auto dataset = rfdata::load_dataset(record.dataset, record.format);

  for (auto& r : record.per_modulation) {
    r.auroc_fanogan.clear();
    r.roc_fanogan.clear();
    r.auroc_cae.reset();
    r.roc_cae.reset();
    if (r.failed) continue;
    const auto mod_dir = run_dir / r.modulation;
    const auto p = detail::prepare_split(dataset, r.modulation, record.split);
    const std::int64_t width = p.test.size(3);
    for (const auto& [measure, epoch] : r.selected_epoch) {
      auto m = load_checkpoint_models(checkpoint_dir(mod_dir, epoch), width);
      const auto scores = anomaly::fanogan_scores(p.test, m.generator, m.encoder, m.critic, record.cfg.kappa);
      auto roc = metrics::auroc(scores, p.labels);
      r.auroc_fanogan[measure] = roc.auroc;
      r.roc_fanogan[measure] = std::move(roc);
    }
    if (record.run_cae) {
      auto cae = models::make_network(models::Role::cae, width);
      models::load_params(*cae, models::read_blob(mod_dir / "cae.bin"));
      auto roc = metrics::auroc(training::reconstruction_errors(cae, p.test), p.labels);
      r.auroc_cae = roc.auroc;
      r.roc_cae = std::move(roc);
    }
  }
  return record;
}

}  // namespace rfanogan::harness
