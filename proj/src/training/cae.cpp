#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rfanogan/error.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::training {

double reconstruction_threshold(std::span<const double> losses) {
  if (losses.empty()) throw Error("reconstruction_threshold: no losses");
  const double n = static_cast<double>(losses.size());
  const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : losses) ss += (v - mean) * (v - mean);
  return mean + std::sqrt(ss / n);
}

std::vector<double> reconstruction_errors(models::Network& network, const torch::Tensor& frames) {
  torch::NoGradGuard no_grad;
  const bool was_training = network->is_training();
  network->eval();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(frames.size(0)));
  constexpr std::int64_t kChunk = 256;
  for (std::int64_t start = 0; start < frames.size(0); start += kChunk) {
    const auto x = frames.slice(0, start, std::min(frames.size(0), start + kChunk)).to(torch::kFloat32);
    const auto err = (network->forward(x) - x).square().reshape({x.size(0), -1}).mean(1).to(torch::kFloat64);
    const auto* p = err.contiguous().data_ptr<double>();
    out.insert(out.end(), p, p + err.numel());
  }
  network->train(was_training);
  return out;
}

CaeModel train_cae(const torch::Tensor& input, const TrainingConfig& cfg) {
  cfg.validate();
  if (!input.defined() || input.size(0) == 0) throw TrainingError("empty training set");
  const auto frames = input.to(torch::kFloat32).contiguous();
  const std::int64_t n = frames.size(0);

  torch::manual_seed(cfg.seed);
  CaeModel model;
  model.network = models::make_network(models::Role::cae, frames.size(3));
  auto& net = model.network;
  net->train();
  torch::optim::Adam opt(net->parameters(),
                         torch::optim::AdamOptions(cfg.lr).betas({cfg.adam_beta1, cfg.adam_beta2}));

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    std::size_t steps = 0;
    for (std::int64_t start = 0; start < n; start += cfg.batch_size) {
      const std::int64_t b = std::min<std::int64_t>(cfg.batch_size, n - start);
      if (b < 2 && n > 1) break;
      const auto idx = torch::tensor(std::vector<std::int64_t>(order.begin() + start, order.begin() + start + b),
                                     torch::kInt64);
      const auto x = frames.index_select(0, idx);
      const auto loss = torch::mse_loss(net->forward(x), x);
      const double value = loss.item<double>();
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite CAE loss at epoch " + std::to_string(epoch) + ", step " +
                            std::to_string(steps));
      }
      opt.zero_grad();
      loss.backward();
      opt.step();
      sum += value;
      ++steps;
    }
    model.epoch_losses.push_back(steps == 0 ? 0.0 : sum / static_cast<double>(steps));
  }

  model.training_losses = reconstruction_errors(net, frames);
  model.threshold = reconstruction_threshold(model.training_losses);
  return model;
}

CaeModel train_cae(std::span<const rfdata::IQFrame> frames, const TrainingConfig& cfg) {
  if (frames.empty()) throw TrainingError("empty training set");
  return train_cae(models::frames_to_tensor(frames), cfg);
}

}  // namespace rfanogan::training
