#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "internal.hpp"
#include "rfanogan/error.hpp"

namespace rfanogan::harness {
namespace fs = std::filesystem;
using nlohmann::json;
using metrics::FidelityMeasure;

namespace {

std::string number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

json roc_to_json(const metrics::RocResult& roc) {
  // Thresholds end at -inf, which JSON cannot carry; it is implied.
  std::vector<double> thresholds(roc.thresholds.begin(), roc.thresholds.end());
  if (!thresholds.empty() && std::isinf(thresholds.back())) thresholds.pop_back();
  return {{"auroc", roc.auroc}, {"thresholds", thresholds}, {"tpr", roc.tpr}, {"fpr", roc.fpr}};
}

metrics::RocResult roc_from_json(const json& j) {
  metrics::RocResult roc;
  roc.auroc = j.at("auroc").get<double>();
  roc.thresholds = j.at("thresholds").get<std::vector<double>>();
  roc.thresholds.push_back(-std::numeric_limits<double>::infinity());
  roc.tpr = j.at("tpr").get<std::vector<double>>();
  roc.fpr = j.at("fpr").get<std::vector<double>>();
  return roc;
}

void write_roc_csv(const fs::path& path, const metrics::RocResult& roc) {
  std::ostringstream out;
  out << "threshold,fpr,tpr\n";
  for (std::size_t n = 0; n < roc.thresholds.size(); ++n) {
    out << number(roc.thresholds[n]) << ',' << number(roc.fpr[n]) << ',' << number(roc.tpr[n]) << '\n';
  }
  detail::write_text(path, out.str());
}

}  // namespace

namespace detail {

std::string_view to_string(training::FeatureSpace space) {
  return space == training::FeatureSpace::critic ? "critic" : "raw";
}

training::FeatureSpace parse_feature_space(std::string_view name) {
  if (name == "raw") return training::FeatureSpace::raw;
  if (name == "critic") return training::FeatureSpace::critic;
  throw Error("unknown feature space: " + std::string(name));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

json manifest_json(const ExperimentRecord& record) {
  json j;
  j["run_id"] = record.run_id;
  j["config"] = record.cfg.to_key_value();
  j["config_hash"] = record.cfg.hash();
  j["seeds"] = {{"training", record.cfg.seed}, {"split", record.split.seed}};
  j["dataset"] = {{"path", record.dataset.string()},
                  {"format", rfdata::to_string(record.format)},
                  {"sha256", record.dataset_sha256}};
  j["split"] = {{"train_frac", record.split.train_frac},
                {"snr_min", record.split.snr_min},
                {"seed", record.split.seed},
                {"normalization", rfdata::to_string(record.split.normalization)}};
  std::vector<std::string> measures;
  for (auto m : record.measures) measures.emplace_back(metrics::to_string(m));
  j["measures"] = measures;
  j["feature_space"] = to_string(record.feature_space);
  j["run_cae"] = record.run_cae;
  j["conventions"] = {
      {"reconstruction_error", "mean of squared differences over all frame entries"},
      {"feature_error", "mean of squared differences over critic features"},
      {"critic_features", "flattened activation before the final linear layer"},
      {"latent_prior", "uniform on [-1, 1]^100"},
      {"roc", "outlier when score > threshold; AUROC counts ties as one half"},
      {"cae_threshold", "mean + population standard deviation of training reconstruction errors"},
      {"fidelity_batch", training::kDefaultFidelityBatch},
  };
  j["hardware"] = hardware_description();

  json mods = json::array();
  for (const auto& r : record.per_modulation) {
    json m;
    m["modulation"] = r.modulation;
    m["failed"] = r.failed;
    if (r.failed) {
      m["failed_stage"] = r.failed_stage;
      m["error"] = r.error;
    }
    m["counts"] = {{"train", r.n_train}, {"test_inlier", r.n_test_inlier}, {"test_outlier", r.n_test_outlier}};
    json selected = json::object();
    for (const auto& [measure, epoch] : r.selected_epoch) selected[std::string(metrics::to_string(measure))] = epoch;
    m["selected_epoch"] = selected;
    m["checkpoint_epochs"] = r.checkpoint_epochs;
    m["cae_threshold"] = r.cae_threshold;
    mods.push_back(std::move(m));
  }
  j["modulations"] = std::move(mods);
  return j;
}

json record_to_json(const ExperimentRecord& record) {
  json j = manifest_json(record);
  j["run_dir"] = record.run_dir.string();
  for (std::size_t n = 0; n < record.per_modulation.size(); ++n) {
    const auto& r = record.per_modulation[n];
    auto& m = j["modulations"][n];
    json fanogan = json::object();
    json rocs = json::object();
    for (const auto& [measure, value] : r.auroc_fanogan) fanogan[std::string(metrics::to_string(measure))] = value;
    for (const auto& [measure, roc] : r.roc_fanogan) rocs[std::string(metrics::to_string(measure))] = roc_to_json(roc);
    m["auroc_fanogan"] = fanogan;
    m["roc_fanogan"] = rocs;
    if (r.auroc_cae) m["auroc_cae"] = *r.auroc_cae;
    if (r.roc_cae) m["roc_cae"] = roc_to_json(*r.roc_cae);
    json epochs = json::array();
    for (const auto& s : r.epochs) {
      epochs.push_back({{"epoch", s.epoch},
                        {"wasserstein", s.wasserstein},
                        {"critic_loss", s.critic_loss},
                        {"gradient_penalty", s.gradient_penalty},
                        {"generator_loss", s.generator_loss},
                        {"critic_steps", s.critic_steps},
                        {"generator_steps", s.generator_steps}});
    }
    m["epochs"] = std::move(epochs);
  }
  if (record.timing) {
    j["timing"] = {{"mean_latency_s", record.timing->mean_latency_s},
                   {"throughput_samples_per_s", record.timing->throughput},
                   {"n_timed", record.timing->n_timed},
                   {"hardware", record.timing->hardware}};
  }
  return j;
}

ExperimentRecord record_from_json(const json& j) {
  ExperimentRecord record;
  record.run_id = j.at("run_id").get<std::string>();
  record.cfg = training::parse_config(j.at("config").get<std::string>());
  const auto& ds = j.at("dataset");
  record.dataset = ds.at("path").get<std::string>();
  record.format = rfdata::parse_dataset_format(ds.at("format").get<std::string>());
  record.dataset_sha256 = ds.at("sha256").get<std::string>();
  const auto& split = j.at("split");
  record.split.train_frac = split.at("train_frac").get<double>();
  record.split.snr_min = split.at("snr_min").get<int>();
  record.split.seed = split.at("seed").get<std::uint64_t>();
  record.split.normalization = rfdata::parse_normalization(split.at("normalization").get<std::string>());
  for (const auto& m : j.at("measures")) record.measures.push_back(metrics::parse_measure(m.get<std::string>()));
  record.feature_space = parse_feature_space(j.at("feature_space").get<std::string>());
  record.run_cae = j.at("run_cae").get<bool>();
  if (j.contains("run_dir")) record.run_dir = j.at("run_dir").get<std::string>();

  for (const auto& m : j.at("modulations")) {
    ModulationResult r;
    r.modulation = m.at("modulation").get<std::string>();
    r.failed = m.at("failed").get<bool>();
    if (r.failed) {
      r.failed_stage = m.value("failed_stage", "");
      r.error = m.value("error", "");
    }
    const auto& counts = m.at("counts");
    r.n_train = counts.at("train").get<std::size_t>();
    r.n_test_inlier = counts.at("test_inlier").get<std::size_t>();
    r.n_test_outlier = counts.at("test_outlier").get<std::size_t>();
    for (const auto& [name, epoch] : m.at("selected_epoch").items()) {
      r.selected_epoch[metrics::parse_measure(name)] = epoch.get<int>();
    }
    r.checkpoint_epochs = m.at("checkpoint_epochs").get<std::vector<int>>();
    r.cae_threshold = m.at("cae_threshold").get<double>();
    if (m.contains("auroc_fanogan")) {
      for (const auto& [name, v] : m.at("auroc_fanogan").items()) {
        r.auroc_fanogan[metrics::parse_measure(name)] = v.get<double>();
      }
    }
    if (m.contains("roc_fanogan")) {
      for (const auto& [name, v] : m.at("roc_fanogan").items()) {
        r.roc_fanogan[metrics::parse_measure(name)] = roc_from_json(v);
      }
    }
    if (m.contains("auroc_cae")) r.auroc_cae = m.at("auroc_cae").get<double>();
    if (m.contains("roc_cae")) r.roc_cae = roc_from_json(m.at("roc_cae"));
    if (m.contains("epochs")) {
      for (const auto& s : m.at("epochs")) {
        training::EpochStats e;
        e.epoch = s.at("epoch").get<int>();
        e.wasserstein = s.at("wasserstein").get<double>();
        e.critic_loss = s.at("critic_loss").get<double>();
        e.gradient_penalty = s.at("gradient_penalty").get<double>();
        e.generator_loss = s.at("generator_loss").get<double>();
        e.critic_steps = s.at("critic_steps").get<std::size_t>();
        e.generator_steps = s.at("generator_steps").get<std::size_t>();
        r.epochs.push_back(e);
      }
    }
    record.per_modulation.push_back(std::move(r));
  }
  if (j.contains("timing")) {
    const auto& t = j.at("timing");
    record.timing = Timing{t.at("mean_latency_s").get<double>(), t.at("throughput_samples_per_s").get<double>(),
                           t.at("n_timed").get<std::size_t>(), t.at("hardware").get<std::string>()};
  }
  return record;
}

}  // namespace detail

std::string auroc_table_csv(const ExperimentRecord& record) {
  std::ostringstream out;
  out << "modulation";
  for (auto m : record.measures) out << ',' << metrics::to_string(m);
  if (record.run_cae) out << ",CAE";
  out << '\n';

  const std::size_t columns = record.measures.size() + (record.run_cae ? 1 : 0);
  std::vector<double> sums(columns, 0.0);
  std::vector<std::size_t> counts(columns, 0);
  auto cell = [&](std::size_t col, const std::optional<double>& v) {
    out << ',';
    if (!v) return;
    out << number(*v);
    sums[col] += *v;
    ++counts[col];
  };
  for (const auto& r : record.per_modulation) {
    out << r.modulation;
    for (std::size_t c = 0; c < record.measures.size(); ++c) {
      const auto it = r.auroc_fanogan.find(record.measures[c]);
      cell(c, it == r.auroc_fanogan.end() || r.failed ? std::nullopt : std::optional<double>(it->second));
    }
    if (record.run_cae) cell(columns - 1, r.failed ? std::nullopt : r.auroc_cae);
    out << '\n';
  }
  if (!record.per_modulation.empty()) {
    out << "average";
    for (std::size_t c = 0; c < columns; ++c) {
      out << ',';
      if (counts[c] > 0) out << number(sums[c] / static_cast<double>(counts[c]));
    }
    out << '\n';
  }
  return out.str();
}

void report(const ExperimentRecord& record, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir / "roc", ec);
  if (ec) throw Error("cannot create report directory " + out_dir.string() + ": " + ec.message());
  detail::write_text(out_dir / "record.json", detail::record_to_json(record).dump(2) + "\n");
  detail::write_text(out_dir / "manifest.json", detail::manifest_json(record).dump(2) + "\n");
  detail::write_text(out_dir / "auroc_table.csv", auroc_table_csv(record));
  for (const auto& r : record.per_modulation) {
    for (const auto& [measure, roc] : r.roc_fanogan) {
      write_roc_csv(out_dir / "roc" / (r.modulation + "_" + std::string(metrics::to_string(measure)) + ".csv"), roc);
    }
    if (r.roc_cae) write_roc_csv(out_dir / "roc" / (r.modulation + "_CAE.csv"), *r.roc_cae);
  }
}

ExperimentRecord read_record(const fs::path& record_json) {
  std::ifstream in(record_json);
  if (!in) throw Error("missing file: " + record_json.string());
  return detail::record_from_json(json::parse(in));
}

}  // namespace rfanogan::harness
