#include "rfanogan/gradient_penalty.hpp"

#include "rfanogan/error.hpp"

namespace rfanogan::models {

torch::Tensor mixing_weights(std::int64_t n, std::uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  return torch::rand({n}, gen, torch::kFloat32);
}

torch::Tensor gradient_penalty(const DifferentiableMap& critic, const torch::Tensor& real,
                               const torch::Tensor& fake, const torch::Tensor& alpha, double lambda) {
  if (real.sizes() != fake.sizes()) throw Error("gradient_penalty: real and fake batches differ in shape");
  if (alpha.dim() != 1 || alpha.size(0) != real.size(0)) {
    throw Error("gradient_penalty: need one mixing weight per sample");
  }
  std::vector<std::int64_t> view(static_cast<std::size_t>(real.dim()), 1);
  view[0] = real.size(0);
  const auto a = alpha.to(real.dtype()).view(view);
  auto interpolates = (a * real.detach() + (1 - a) * fake.detach()).requires_grad_(true);

  torch::Tensor gradients;
  try {
    const auto out = critic(interpolates);
    gradients = torch::autograd::grad({out}, {interpolates}, {torch::ones_like(out)},
                                      /*retain_graph=*/true, /*create_graph=*/true)[0];
  } catch (const c10::Error& e) {
    throw Error(std::string("critic is not differentiable at the interpolates: ") + e.what_without_backtrace());
  }
  const auto norms = gradients.reshape({gradients.size(0), -1}).norm(2, 1);
  return lambda * (norms - 1).square().mean();
}

double gradient_penalty(const DifferentiableMap& critic, const torch::Tensor& real, const torch::Tensor& fake,
                        double lambda, std::uint64_t seed) {
  return gradient_penalty(critic, real, fake, mixing_weights(real.size(0), seed), lambda).item<double>();
}

}  // namespace rfanogan::models
