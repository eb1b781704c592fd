#pragma once

// f-AnoGAN training: WGAN-GP generator/critic training with fidelity-driven
// checkpointing, encoder training against the frozen GAN, and the
// convolutional autoencoder baseline.

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfanogan/metrics.hpp"
#include "rfanogan/network.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::training {

struct TrainingConfig {
  int epochs = 500;
  double lr = 0.0002;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.9;
  int batch_size = 64;
  int n_critic = 3;
  double gp_lambda = 10.0;
  double kappa = 1.0;
  metrics::FidelityMeasure selection_measure = metrics::FidelityMeasure::jsd;
  int eval_every = 10;
  std::uint64_t seed = 0;

  void validate() const;
  // Canonical "key=value" lines in a fixed key order.
  std::string to_key_value() const;
  std::string hash() const;

  bool operator==(const TrainingConfig&) const = default;
};

// Applies one "key=value" setting; unknown keys and unparsable values throw.
void apply_setting(TrainingConfig& cfg, std::string_view key, std::string_view value);
// Parses key=value lines ('#' starts a comment) on top of `base`.
TrainingConfig parse_config(std::string_view text, TrainingConfig base = {});
TrainingConfig load_config(const std::filesystem::path& path, TrainingConfig base = {});

// Single-threaded torch execution; required for bit-identical reruns.
void use_deterministic_execution();

struct Checkpoint {
  int epoch = 0;
  metrics::FidelityReport fidelity;
  // Measures whose best value this checkpoint improved.
  std::vector<metrics::FidelityMeasure> improved;
  bool terminal = false;
  // Directory holding the blobs; empty while they are kept in memory.
  std::filesystem::path path;
  models::ParamBlob generator;
  models::ParamBlob critic;

  bool improved_on(metrics::FidelityMeasure m) const;
};

// Writes <dir>/generator.bin, critic.bin and metadata.txt (key=value lines),
// then releases the in-memory blobs.
void persist_checkpoint(Checkpoint& checkpoint, const std::filesystem::path& dir, const std::string& config_hash);
Checkpoint read_checkpoint(const std::filesystem::path& dir);
models::ParamBlob generator_blob(const Checkpoint& checkpoint);
models::ParamBlob critic_blob(const Checkpoint& checkpoint);

// Best checkpoint under `measure` (min for JSD, max otherwise); earliest epoch wins ties.
const Checkpoint& select_checkpoint(std::span<const Checkpoint> history, metrics::FidelityMeasure measure);

// True when the checkpoints tagged as improving `measure` carry strictly
// improving values in epoch order.
bool saved_values_strictly_improve(std::span<const Checkpoint> history, metrics::FidelityMeasure measure);

enum class FeatureSpace { raw, critic };

struct EpochStats {
  int epoch = 0;
  double wasserstein = 0.0;  // mean over critic steps of mean D(x) - mean D(G(z))
  double critic_loss = 0.0;
  double gradient_penalty = 0.0;
  double generator_loss = 0.0;
  std::size_t critic_steps = 0;
  std::size_t generator_steps = 0;
};

inline constexpr std::size_t kDefaultFidelityBatch = 512;

struct WganOptions {
  // Measures that trigger a checkpoint when they improve; empty means the
  // config's selection measure only.
  std::vector<metrics::FidelityMeasure> tracked;
  std::size_t fidelity_batch = kDefaultFidelityBatch;
  metrics::FidelityOptions fidelity;
  FeatureSpace feature_space = FeatureSpace::raw;
  // Checkpoints are written under <checkpoint_dir>/epoch-<n>/ when set.
  std::filesystem::path checkpoint_dir;
  std::function<void(const EpochStats&)> on_epoch;
};

struct WganResult {
  models::Network generator{nullptr};
  models::Network critic{nullptr};
  std::vector<Checkpoint> history;
  std::vector<EpochStats> epochs;
};

WganResult train_wgan_gp(const torch::Tensor& frames, const TrainingConfig& cfg, const WganOptions& options = {});
WganResult train_wgan_gp(std::span<const rfdata::IQFrame> frames, const TrainingConfig& cfg,
                         const WganOptions& options = {});

struct EncoderResult {
  models::Network encoder{nullptr};
  std::vector<double> epoch_losses;
  std::vector<double> step_losses;
};

// mean ||x - G(E(x))||^2 + kappa * mean ||f(x) - f(G(E(x)))||^2, both as
// per-entry means. Evaluated without gradients.
double encoder_objective(models::Network& generator, models::Network& critic, models::Network& encoder,
                         const torch::Tensor& x, double kappa);

// Trains `encoder` against frozen generator/critic. Throws TrainingError if
// either frozen network's parameters change.
EncoderResult train_encoder(models::Network& generator, models::Network& critic, models::Network encoder,
                            const torch::Tensor& frames, const TrainingConfig& cfg);
EncoderResult train_encoder(models::Network& generator, models::Network& critic,
                            std::span<const rfdata::IQFrame> frames, const TrainingConfig& cfg);

struct CaeModel {
  models::Network network{nullptr};
  double threshold = 0.0;
  std::vector<double> epoch_losses;
  std::vector<double> training_losses;  // per-frame reconstruction MSE after training
};

// mean + population standard deviation.
double reconstruction_threshold(std::span<const double> losses);
// Per-frame mean squared reconstruction error, network in eval mode.
std::vector<double> reconstruction_errors(models::Network& network, const torch::Tensor& frames);

CaeModel train_cae(const torch::Tensor& frames, const TrainingConfig& cfg);
CaeModel train_cae(std::span<const rfdata::IQFrame> frames, const TrainingConfig& cfg);

}  // namespace rfanogan::training
