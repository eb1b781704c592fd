#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rfanogan/error.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::training {
namespace {

torch::Tensor objective(models::Network& generator, models::Network& critic, models::Network& encoder,
                        const torch::Tensor& x, double kappa) {
  const auto x_hat = generator->forward(encoder->forward(x));
  auto loss = torch::mse_loss(x_hat, x);
  if (kappa != 0.0) {
    torch::Tensor f_real;
    {
      torch::NoGradGuard no_grad;
      f_real = critic->features(x);
    }
    loss = loss + kappa * torch::mse_loss(critic->features(x_hat), f_real);
  }
  return loss;
}

}  // namespace

double encoder_objective(models::Network& generator, models::Network& critic, models::Network& encoder,
                         const torch::Tensor& x, double kappa) {
  torch::NoGradGuard no_grad;
  const bool g_training = generator->is_training();
  const bool d_training = critic->is_training();
  const bool e_training = encoder->is_training();
  generator->eval();
  critic->eval();
  encoder->eval();
  const double value = objective(generator, critic, encoder, x, kappa).item<double>();
  generator->train(g_training);
  critic->train(d_training);
  encoder->train(e_training);
  return value;
}

EncoderResult train_encoder(models::Network& generator, models::Network& critic, models::Network encoder,
                            const torch::Tensor& input, const TrainingConfig& cfg) {
  cfg.validate();
  if (!input.defined() || input.size(0) == 0) throw TrainingError("empty training set");
  const auto frames = input.to(torch::kFloat32).contiguous();
  const std::int64_t n = frames.size(0);

  generator->eval();
  critic->eval();
  models::set_requires_grad(*generator, false);
  models::set_requires_grad(*critic, false);
  const auto g_hash = models::param_hash(*generator);
  const auto d_hash = models::param_hash(*critic);

  EncoderResult result;
  result.encoder = encoder;
  encoder->train();
  torch::optim::Adam opt(encoder->parameters(),
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
      const auto loss = objective(generator, critic, encoder, frames.index_select(0, idx), cfg.kappa);
      const double value = loss.item<double>();
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite encoder loss at epoch " + std::to_string(epoch) + ", step " +
                            std::to_string(steps));
      }
      opt.zero_grad();
      loss.backward();
      opt.step();
      result.step_losses.push_back(value);
      sum += value;
      ++steps;
    }
    result.epoch_losses.push_back(steps == 0 ? 0.0 : sum / static_cast<double>(steps));
  }

  if (models::param_hash(*generator) != g_hash || models::param_hash(*critic) != d_hash) {
    throw TrainingError("frozen generator or critic changed during encoder training");
  }
  return result;
}

EncoderResult train_encoder(models::Network& generator, models::Network& critic,
                            std::span<const rfdata::IQFrame> frames, const TrainingConfig& cfg) {
  if (frames.empty()) throw TrainingError("empty training set");
  torch::manual_seed(cfg.seed);
  auto encoder = models::make_network(models::Role::encoder, static_cast<std::int64_t>(frames.front().width()));
  return train_encoder(generator, critic, encoder, models::frames_to_tensor(frames), cfg);
}

}  // namespace rfanogan::training
