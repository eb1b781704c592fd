#include <charconv>
#include <fstream>
#include <sstream>

#include "rfanogan/error.hpp"
#include "rfanogan/hashing.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::training {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("config: bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void TrainingConfig::validate() const {
  if (epochs < 0) throw Error("config: epochs must be >= 0");
  if (!(lr > 0.0)) throw Error("config: lr must be > 0");
  if (n_critic < 1) throw Error("config: n_critic must be >= 1");
  if (eval_every < 1) throw Error("config: eval_every must be >= 1");
  if (batch_size < 1) throw Error("config: batch_size must be >= 1");
  if (gp_lambda < 0.0) throw Error("config: gp_lambda must be >= 0");
  if (kappa < 0.0) throw Error("config: kappa must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw Error("config: Adam betas must lie in [0, 1)");
  }
}

std::string TrainingConfig::to_key_value() const {
  std::ostringstream out;
  out << "epochs=" << epochs << '\n'
      << "lr=" << format_double(lr) << '\n'
      << "adam_beta1=" << format_double(adam_beta1) << '\n'
      << "adam_beta2=" << format_double(adam_beta2) << '\n'
      << "batch_size=" << batch_size << '\n'
      << "n_critic=" << n_critic << '\n'
      << "gp_lambda=" << format_double(gp_lambda) << '\n'
      << "kappa=" << format_double(kappa) << '\n'
      << "selection_measure=" << metrics::to_string(selection_measure) << '\n'
      << "eval_every=" << eval_every << '\n'
      << "seed=" << seed << '\n';
  return out.str();
}

std::string TrainingConfig::hash() const { return sha256_hex(to_key_value()); }

void apply_setting(TrainingConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "epochs") cfg.epochs = parse_number<int>(key, value);
  else if (key == "lr") cfg.lr = parse_number<double>(key, value);
  else if (key == "adam_beta1") cfg.adam_beta1 = parse_number<double>(key, value);
  else if (key == "adam_beta2") cfg.adam_beta2 = parse_number<double>(key, value);
  else if (key == "batch_size") cfg.batch_size = parse_number<int>(key, value);
  else if (key == "n_critic") cfg.n_critic = parse_number<int>(key, value);
  else if (key == "gp_lambda") cfg.gp_lambda = parse_number<double>(key, value);
  else if (key == "kappa") cfg.kappa = parse_number<double>(key, value);
  else if (key == "selection_measure") cfg.selection_measure = metrics::parse_measure(value);
  else if (key == "eval_every") cfg.eval_every = parse_number<int>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else throw Error("config: unknown key '" + std::string(key) + "'");
}

TrainingConfig parse_config(std::string_view text, TrainingConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("config: line " + std::to_string(line_no) + " is not key=value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

TrainingConfig load_config(const std::filesystem::path& path, TrainingConfig base) {
  std::ifstream in(path);
  if (!in) throw Error("missing file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), base);
}

void use_deterministic_execution() {
  torch::set_num_threads(1);
  at::globalContext().setDeterministicAlgorithms(true, /*warn_only=*/true);
}

}  // namespace rfanogan::training
