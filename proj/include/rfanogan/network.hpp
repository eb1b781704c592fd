#pragma once

// Trainable torch modules instantiated from a NetworkSpec, plus parameter
// blobs used for checkpoints and frozen-network checks.

#include <torch/torch.h>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfanogan/network_spec.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::models {

class NetworkImpl : public torch::nn::Module {
 public:
  explicit NetworkImpl(NetworkSpec spec);

  torch::Tensor forward(torch::Tensor x);
  // Activation of spec().feature_layer.
  torch::Tensor features(torch::Tensor x);
  // Output and feature activation from a single pass.
  std::pair<torch::Tensor, torch::Tensor> forward_with_features(torch::Tensor x);

  const NetworkSpec& spec() const noexcept { return spec_; }

 private:
  torch::Tensor run(torch::Tensor x, std::size_t stop, torch::Tensor* feature_out);

  NetworkSpec spec_;
  std::vector<torch::nn::AnyModule> layers_;
};

TORCH_MODULE(Network);

Network make_network(Role role, std::int64_t frame_width = kDefaultFrameWidth);
// Fresh module with the same spec, parameters and buffers.
Network clone_network(const Network& net);
void set_requires_grad(torch::nn::Module& module, bool requires_grad);

// Stacks frames into a float tensor of shape (N, 1, 2, W).
torch::Tensor frames_to_tensor(std::span<const rfdata::IQFrame> frames);
// Latent draws from the uniform prior on [-1, 1]^dim.
torch::Tensor sample_latent(std::int64_t n, std::int64_t dim = kLatentDim);

using ParamBlob = std::string;

// Deterministic byte serialisation of all parameters and buffers.
ParamBlob save_params(const torch::nn::Module& module);
void load_params(torch::nn::Module& module, const ParamBlob& blob);
std::string param_hash(const torch::nn::Module& module);

void write_blob(const std::filesystem::path& path, const ParamBlob& blob);
ParamBlob read_blob(const std::filesystem::path& path);

}  // namespace rfanogan::models
