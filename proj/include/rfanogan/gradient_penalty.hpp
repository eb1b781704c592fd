#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <functional>

namespace rfanogan::models {

using DifferentiableMap = std::function<torch::Tensor(const torch::Tensor&)>;

inline constexpr double kDefaultGpLambda = 10.0;

// Per-sample mixing weights alpha ~ U[0, 1), drawn from a private generator.
torch::Tensor mixing_weights(std::int64_t n, std::uint64_t seed);

// lambda * mean_i (||grad critic(x_hat_i)||_2 - 1)^2 with
// x_hat = alpha * real + (1 - alpha) * fake. The result keeps its graph so it
// can be added to a critic loss and backpropagated.
torch::Tensor gradient_penalty(const DifferentiableMap& critic, const torch::Tensor& real,
                               const torch::Tensor& fake, const torch::Tensor& alpha, double lambda);

double gradient_penalty(const DifferentiableMap& critic, const torch::Tensor& real, const torch::Tensor& fake,
                        double lambda, std::uint64_t seed);

}  // namespace rfanogan::models
