#include <cmath>

#include "rfanogan/anomaly.hpp"
#include "rfanogan/error.hpp"

namespace rfanogan::anomaly {
namespace {

constexpr int kMaxHalvings = 30;

// Turns off parameter gradients for the lifetime of the guard.
class FrozenParameters {
 public:
  explicit FrozenParameters(torch::nn::Module& module) {
    for (auto& p : module.parameters()) {
      saved_.emplace_back(p, p.requires_grad());
      p.requires_grad_(false);
    }
  }
  ~FrozenParameters() {
    for (auto& [p, flag] : saved_) p.requires_grad_(flag);
  }
  FrozenParameters(const FrozenParameters&) = delete;
  FrozenParameters& operator=(const FrozenParameters&) = delete;

 private:
  std::vector<std::pair<torch::Tensor, bool>> saved_;
};

}  // namespace

AnoganResult anogan_search(const torch::Tensor& input, models::Network& generator, models::Network& critic,
                           const AnoganOptions& options) {
  if (options.steps < 1) throw Error("anogan: steps must be >= 1");
  if (!(options.lambda > 0.0 && options.lambda < 1.0)) throw Error("anogan: lambda must lie in (0, 1)");
  if (!(options.step_size > 0.0)) throw Error("anogan: step size must be > 0");
  if (input.dim() < 1 || input.size(0) != 1) throw ShapeError(0, "anogan scores one sample at a time");

  generator->eval();
  critic->eval();
  FrozenParameters freeze_g(*generator);
  FrozenParameters freeze_d(*critic);

  const auto x = input.to(torch::kFloat32);
  torch::Tensor f_x;
  {
    torch::NoGradGuard no_grad;
    f_x = critic->features(x);
  }
  const double lambda = options.lambda;
  auto loss_at = [&](const torch::Tensor& z) {
    const auto g = generator->forward(z);
    if (g.sizes() != x.sizes()) throw ShapeError(0, "generator output does not match the sample shape");
    return (1.0 - lambda) * (x - g).abs().sum() + lambda * (f_x - critic->features(g)).abs().sum();
  };

  std::vector<std::int64_t> z_shape{1};
  const auto& latent = generator->spec().input_shape();
  z_shape.insert(z_shape.end(), latent.begin(), latent.end());
  auto gen = at::make_generator<at::CPUGeneratorImpl>(options.seed);
  auto z = (torch::rand(z_shape, gen, torch::kFloat32) * 2 - 1).requires_grad_(true);

  AnoganResult result;
  auto loss = loss_at(z);
  double value = loss.item<double>();
  result.trace.push_back(value);
  for (int step = 0; step < options.steps && value > kAnoganZeroLoss; ++step) {
    const auto grad = torch::autograd::grad({loss}, {z})[0];
    double eta = options.step_size;
    auto candidate = (z.detach() - eta * grad).clamp(-1.0, 1.0).requires_grad_(true);
    auto next = loss_at(candidate);
    double next_value = next.item<double>();
    bool stalled = false;
    if (options.backtracking) {
      for (int h = 0; h < kMaxHalvings && next_value > value; ++h) {
        eta /= 2;
        candidate = (z.detach() - eta * grad).clamp(-1.0, 1.0).requires_grad_(true);
        next = loss_at(candidate);
        next_value = next.item<double>();
      }
      if (next_value > value) {
        candidate = z.detach().requires_grad_(true);
        next = loss_at(candidate);
        next_value = value;
        stalled = true;
      }
    }
    if (!std::isfinite(next_value)) throw Error("anogan: non-finite loss during latent search");
    z = candidate;
    loss = next;
    value = next_value;
    result.trace.push_back(value);
    ++result.steps_taken;
    if (stalled) break;
  }
  result.score.raw = value;
  result.z = z.detach();
  return result;
}

AnomalyScore anogan_score(const rfdata::IQFrame& x, models::Network& generator, models::Network& critic,
                          const AnoganOptions& options) {
  return anogan_search(models::frames_to_tensor({&x, 1}), generator, critic, options).score;
}

}  // namespace rfanogan::anomaly
