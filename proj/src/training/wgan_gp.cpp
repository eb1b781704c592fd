#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "rfanogan/error.hpp"
#include "rfanogan/gradient_penalty.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::training {
namespace {

using metrics::FidelityMeasure;

// Stream offset so the evaluation latents never coincide with training draws.
constexpr std::uint64_t kEvalLatentStream = 0x5eed'e7a1ULL;

metrics::FeatureBatch to_features(const torch::Tensor& t) {
  const auto flat = t.detach().reshape({t.size(0), -1}).to(torch::kFloat64).contiguous();
  const auto* p = flat.data_ptr<double>();
  return metrics::FeatureBatch(static_cast<std::size_t>(flat.size(1)),
                               std::vector<double>(p, p + flat.numel()));
}

void check_frames(const torch::Tensor& frames) {
  if (!frames.defined() || frames.size(0) == 0) throw TrainingError("empty training set");
  if (frames.dim() != 4 || frames.size(1) != 1 || frames.size(2) != 2) {
    throw TrainingError("training frames must have shape (N, 1, 2, W)");
  }
}

void require_finite(double value, const char* what, int epoch, std::size_t step) {
  if (!std::isfinite(value)) {
    throw TrainingError(std::string("non-finite ") + what + " at epoch " + std::to_string(epoch) + ", step " +
                        std::to_string(step));
  }
}

}  // namespace

WganResult train_wgan_gp(const torch::Tensor& input, const TrainingConfig& cfg, const WganOptions& options) {
  cfg.validate();
  check_frames(input);
  const auto frames = input.to(torch::kFloat32).contiguous();
  const std::int64_t n = frames.size(0);
  const std::int64_t width = frames.size(3);

  torch::manual_seed(cfg.seed);
  WganResult result;
  result.generator = models::make_network(models::Role::generator, width);
  result.critic = models::make_network(models::Role::critic, width);
  auto& G = result.generator;
  auto& D = result.critic;

  const auto adam = torch::optim::AdamOptions(cfg.lr).betas({cfg.adam_beta1, cfg.adam_beta2});
  torch::optim::Adam opt_g(G->parameters(), adam);
  torch::optim::Adam opt_d(D->parameters(), adam);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  // Fixed evaluation batch: a seeded subset of the real frames against
  // generated frames from fixed latents.
  const auto n_eval = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::max<std::size_t>(options.fidelity_batch, 2)));
  std::shuffle(order.begin(), order.end(), rng);
  const auto eval_idx = torch::tensor(std::vector<std::int64_t>(order.begin(), order.begin() + n_eval), torch::kInt64);
  const auto real_eval = frames.index_select(0, eval_idx);
  auto eval_gen = at::make_generator<at::CPUGeneratorImpl>(cfg.seed + kEvalLatentStream);
  const auto z_eval = torch::rand({n_eval, G->spec().latent_dim}, eval_gen, torch::kFloat32) * 2 - 1;

  std::vector<FidelityMeasure> tracked = options.tracked;
  if (tracked.empty()) tracked.push_back(cfg.selection_measure);
  std::map<FidelityMeasure, double> best;

  const std::string config_hash = cfg.hash();
  auto evaluate = [&](int epoch, bool terminal) {
    metrics::FidelityReport report;
    {
      torch::NoGradGuard no_grad;
      G->eval();
      const auto fake = G->forward(z_eval);
      G->train();
      if (options.feature_space == FeatureSpace::critic) {
        D->eval();
        report = metrics::evaluate_fidelity(to_features(D->features(real_eval)), to_features(D->features(fake)),
                                            options.fidelity);
        D->train();
      } else {
        report = metrics::evaluate_fidelity(to_features(real_eval), to_features(fake), options.fidelity);
      }
    }
    std::vector<FidelityMeasure> improved;
    for (auto m : tracked) {
      const double v = report.value(m);
      const auto it = best.find(m);
      if (it == best.end() || metrics::improves(m, v, it->second)) {
        best[m] = v;
        improved.push_back(m);
      }
    }
    if (improved.empty() && !terminal) return;
    Checkpoint c;
    c.epoch = epoch;
    c.fidelity = report;
    c.improved = std::move(improved);
    c.terminal = terminal;
    c.generator = models::save_params(*G);
    c.critic = models::save_params(*D);
    if (!options.checkpoint_dir.empty()) {
      persist_checkpoint(c, options.checkpoint_dir / ("epoch-" + std::to_string(epoch)), config_hash);
    }
    result.history.push_back(std::move(c));
  };

  if (cfg.epochs == 0) {
    evaluate(0, true);
    return result;
  }

  const auto critic_map = [&D](const torch::Tensor& x) { return D->forward(x); };
  std::size_t critic_steps_total = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    stats.epoch = epoch;
    for (std::int64_t start = 0; start < n; start += cfg.batch_size) {
      const std::int64_t b = std::min<std::int64_t>(cfg.batch_size, n - start);
      if (b < 2) break;  // batch-norm statistics need two samples
      const auto idx = torch::tensor(std::vector<std::int64_t>(order.begin() + start, order.begin() + start + b),
                                     torch::kInt64);
      const auto real = frames.index_select(0, idx);

      torch::Tensor fake;
      {
        torch::NoGradGuard no_grad;
        fake = G->forward(models::sample_latent(b, G->spec().latent_dim));
      }
      // Real and fake share one critic pass so batch-norm statistics cannot
      // separate them on their own.
      const auto d_out = D->forward(torch::cat({real, fake}));
      const auto d_real = d_out.slice(0, 0, b).mean();
      const auto d_fake = d_out.slice(0, b).mean();
      const auto alpha = torch::rand({b}, torch::kFloat32);
      const auto gp = models::gradient_penalty(critic_map, real, fake, alpha, cfg.gp_lambda);
      const auto loss = d_fake - d_real + gp;
      const double loss_value = loss.item<double>();
      require_finite(loss_value, "critic loss", epoch, stats.critic_steps);
      opt_d.zero_grad();
      loss.backward();
      opt_d.step();

      stats.wasserstein += (d_real - d_fake).item<double>();
      stats.critic_loss += loss_value;
      stats.gradient_penalty += gp.item<double>();
      ++stats.critic_steps;
      ++critic_steps_total;

      if (critic_steps_total % static_cast<std::size_t>(cfg.n_critic) == 0) {
        models::set_requires_grad(*D, false);
        const auto generated = G->forward(models::sample_latent(b, G->spec().latent_dim));
        const auto g_loss = -D->forward(torch::cat({real, generated})).slice(0, b).mean();
        const double g_value = g_loss.item<double>();
        require_finite(g_value, "generator loss", epoch, stats.generator_steps);
        opt_g.zero_grad();
        g_loss.backward();
        opt_g.step();
        models::set_requires_grad(*D, true);
        stats.generator_loss += g_value;
        ++stats.generator_steps;
      }
    }
    if (stats.critic_steps > 0) {
      const auto k = static_cast<double>(stats.critic_steps);
      stats.wasserstein /= k;
      stats.critic_loss /= k;
      stats.gradient_penalty /= k;
    }
    if (stats.generator_steps > 0) stats.generator_loss /= static_cast<double>(stats.generator_steps);
    result.epochs.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);

    const bool terminal = epoch == cfg.epochs;
    if (epoch % cfg.eval_every == 0 || terminal) evaluate(epoch, terminal);
  }
  return result;
}

WganResult train_wgan_gp(std::span<const rfdata::IQFrame> frames, const TrainingConfig& cfg,
                         const WganOptions& options) {
  if (frames.empty()) throw TrainingError("empty training set");
  return train_wgan_gp(models::frames_to_tensor(frames), cfg, options);
}

}  // namespace rfanogan::training
