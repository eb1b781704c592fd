#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "rfanogan/error.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::training {

bool Checkpoint::improved_on(metrics::FidelityMeasure m) const {
  return std::ranges::find(improved, m) != improved.end();
}

void persist_checkpoint(Checkpoint& checkpoint, const std::filesystem::path& dir, const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  models::write_blob(dir / "generator.bin", checkpoint.generator);
  models::write_blob(dir / "critic.bin", checkpoint.critic);

  std::string improved;
  for (auto m : checkpoint.improved) improved += (improved.empty() ? "" : ",") + std::string(metrics::to_string(m));

  const auto& f = checkpoint.fidelity;
  std::ofstream meta(dir / "metadata.txt", std::ios::trunc);
  if (!meta) throw Error("cannot open for writing: " + (dir / "metadata.txt").string());
  meta.precision(17);
  meta << "epoch=" << checkpoint.epoch << '\n'
       << "terminal=" << (checkpoint.terminal ? 1 : 0) << '\n'
       << "improved=" << improved << '\n'
       << "config_hash=" << config_hash << '\n'
       << "fidelity=" << f.to_csv() << '\n'
       << "precision=" << f.precision << '\n'
       << "recall=" << f.recall << '\n'
       << "density=" << f.density << '\n'
       << "coverage=" << f.coverage << '\n';
  for (auto m : metrics::kAllMeasures) meta << metrics::to_string(m) << '=' << f.value(m) << '\n';
  if (!meta) throw Error("write failed: " + (dir / "metadata.txt").string());

  checkpoint.path = dir;
  checkpoint.generator.clear();
  checkpoint.generator.shrink_to_fit();
  checkpoint.critic.clear();
  checkpoint.critic.shrink_to_fit();
}

Checkpoint read_checkpoint(const std::filesystem::path& dir) {
  std::ifstream meta(dir / "metadata.txt");
  if (!meta) throw Error("missing file: " + (dir / "metadata.txt").string());
  std::map<std::string, std::string> kv;
  for (std::string line; std::getline(meta, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error("checkpoint metadata lacks '" + key + "' in " + dir.string());
    return it->second;
  };

  Checkpoint c;
  c.epoch = std::stoi(get("epoch"));
  c.terminal = get("terminal") == "1";
  c.fidelity = metrics::FidelityReport::from_csv(get("fidelity"));
  std::stringstream improved(get("improved"));
  for (std::string name; std::getline(improved, name, ',');) {
    if (!name.empty()) c.improved.push_back(metrics::parse_measure(name));
  }
  c.path = dir;
  return c;
}

models::ParamBlob generator_blob(const Checkpoint& checkpoint) {
  return checkpoint.path.empty() ? checkpoint.generator : models::read_blob(checkpoint.path / "generator.bin");
}

models::ParamBlob critic_blob(const Checkpoint& checkpoint) {
  return checkpoint.path.empty() ? checkpoint.critic : models::read_blob(checkpoint.path / "critic.bin");
}

const Checkpoint& select_checkpoint(std::span<const Checkpoint> history, metrics::FidelityMeasure measure) {
  if (history.empty()) throw Error("select_checkpoint: empty history");
  const Checkpoint* best = nullptr;
  for (const auto& c : history) {
    if (best == nullptr) {
      best = &c;
      continue;
    }
    const double v = c.fidelity.value(measure);
    const double b = best->fidelity.value(measure);
    if (metrics::improves(measure, v, b) || (v == b && c.epoch < best->epoch)) best = &c;
  }
  return *best;
}

bool saved_values_strictly_improve(std::span<const Checkpoint> history, metrics::FidelityMeasure measure) {
  std::optional<double> last;
  int last_epoch = -1;
  for (const auto& c : history) {
    if (!c.improved_on(measure)) continue;
    const double v = c.fidelity.value(measure);
    if (c.epoch <= last_epoch) return false;
    if (last && !metrics::improves(measure, v, *last)) return false;
    last = v;
    last_epoch = c.epoch;
  }
  return true;
}

}  // namespace rfanogan::training
