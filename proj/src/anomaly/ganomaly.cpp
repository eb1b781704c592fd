#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rfanogan/anomaly.hpp"
#include "rfanogan/error.hpp"

namespace rfanogan::anomaly {
namespace {

constexpr double kWeightSumTolerance = 1e-9;

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw ShapeError(0, std::string(what) + " operands differ in length");
}

double l1(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += std::abs(a[n] - b[n]);
  return s;
}

double l2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += (a[n] - b[n]) * (a[n] - b[n]);
  return std::sqrt(s);
}

}  // namespace

void GanomalyWeights::validate() const {
  for (double w : {adversarial, contextual, encoder}) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error("ganomaly weights must lie in [0, 1]");
  }
  if (std::abs(adversarial + contextual + encoder - 1.0) > kWeightSumTolerance) {
    throw Error("ganomaly weights must sum to 1");
  }
}

GanomalyLosses ganomaly_losses(std::span<const double> x, std::span<const double> x_hat,
                               std::span<const double> z, std::span<const double> z_hat,
                               std::span<const double> f_x, std::span<const double> f_x_hat,
                               const GanomalyWeights& weights) {
  weights.validate();
  require_same_length(x, x_hat, "contextual");
  require_same_length(z, z_hat, "encoder");
  require_same_length(f_x, f_x_hat, "adversarial");
  GanomalyLosses out;
  out.adversarial = l2(f_x, f_x_hat);
  out.contextual = l1(x, x_hat);
  out.encoder = l2(z, z_hat);
  out.total = weights.adversarial * out.adversarial + weights.contextual * out.contextual +
              weights.encoder * out.encoder;
  return out;
}

AnomalyScore ganomaly_score(std::span<const double> z, std::span<const double> z_hat) {
  require_same_length(z, z_hat, "ganomaly score");
  return {l1(z, z_hat), std::nullopt};
}

AnomalyScore ganomaly_score(const rfdata::IQFrame& x, GanomalyModel& model) {
  const auto& in = model.input_encoder->spec().input_shape();
  if (in.size() != 3 || in[2] != static_cast<std::int64_t>(x.width())) {
    throw ShapeError(0, "frame width " + std::to_string(x.width()) + " does not fit encoder input " +
                            models::shape_string(in));
  }
  torch::NoGradGuard no_grad;
  model.input_encoder->eval();
  model.decoder->eval();
  model.output_encoder->eval();
  const auto t = models::frames_to_tensor({&x, 1});
  const auto z = model.input_encoder->forward(t);
  const auto z_hat = model.output_encoder->forward(model.decoder->forward(z));
  return {(z - z_hat).abs().sum().item<double>(), std::nullopt};
}

GanomalyModel train_ganomaly(const torch::Tensor& input, const training::TrainingConfig& cfg,
                             const GanomalyWeights& weights) {
  cfg.validate();
  weights.validate();
  if (!input.defined() || input.size(0) == 0) throw TrainingError("empty training set");
  const auto frames = input.to(torch::kFloat32).contiguous();
  const std::int64_t n = frames.size(0);
  const std::int64_t width = frames.size(3);

  torch::manual_seed(cfg.seed);
  GanomalyModel m;
  m.input_encoder = models::make_network(models::Role::encoder, width);
  m.decoder = models::make_network(models::Role::generator, width);
  m.output_encoder = models::make_network(models::Role::encoder, width);
  m.discriminator = models::make_network(models::Role::critic, width);

  const auto adam = torch::optim::AdamOptions(cfg.lr).betas({cfg.adam_beta1, cfg.adam_beta2});
  std::vector<torch::Tensor> g_params;
  for (auto* net : {&m.input_encoder, &m.decoder, &m.output_encoder}) {
    const auto p = (*net)->parameters();
    g_params.insert(g_params.end(), p.begin(), p.end());
  }
  torch::optim::Adam opt_g(g_params, adam);
  torch::optim::Adam opt_d(m.discriminator->parameters(), adam);

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

      models::set_requires_grad(*m.discriminator, false);
      const auto z = m.input_encoder->forward(x);
      const auto x_hat = m.decoder->forward(z);
      const auto z_hat = m.output_encoder->forward(x_hat);
      const auto f_x = m.discriminator->features(x).detach();
      const auto l_adv = (f_x - m.discriminator->features(x_hat)).reshape({b, -1}).norm(2, 1).mean();
      const auto l_con = (x - x_hat).abs().reshape({b, -1}).sum(1).mean();
      const auto l_enc = (z - z_hat).reshape({b, -1}).norm(2, 1).mean();
      const auto loss = weights.adversarial * l_adv + weights.contextual * l_con + weights.encoder * l_enc;
      const double value = loss.item<double>();
      if (!std::isfinite(value)) throw TrainingError("non-finite ganomaly loss at epoch " + std::to_string(epoch));
      opt_g.zero_grad();
      loss.backward();
      opt_g.step();
      models::set_requires_grad(*m.discriminator, true);

      const auto real_logits = m.discriminator->forward(x);
      const auto fake_logits = m.discriminator->forward(x_hat.detach());
      const auto d_loss = torch::binary_cross_entropy_with_logits(real_logits, torch::ones_like(real_logits)) +
                          torch::binary_cross_entropy_with_logits(fake_logits, torch::zeros_like(fake_logits));
      opt_d.zero_grad();
      d_loss.backward();
      opt_d.step();

      sum += value;
      ++steps;
    }
    m.epoch_losses.push_back(steps == 0 ? 0.0 : sum / static_cast<double>(steps));
  }
  return m;
}

}  // namespace rfanogan::anomaly
