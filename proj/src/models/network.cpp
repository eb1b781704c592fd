#include "rfanogan/network.hpp"

#include "rfanogan/error.hpp"

namespace rfanogan::models {
namespace nn = torch::nn;

namespace {

nn::AnyModule make_layer(const LayerSpec& layer, bool followed_by_batchnorm) {
  switch (layer.kind) {
    case LayerKind::conv2d:
      return nn::AnyModule(nn::Conv2d(nn::Conv2dOptions(layer.in_shape[0], layer.filters, {layer.kernel.h, layer.kernel.w})
                                          .stride({layer.stride.h, layer.stride.w})
                                          .padding({layer.padding.h, layer.padding.w})
                                          .bias(!followed_by_batchnorm)));
    case LayerKind::tconv2d:
      return nn::AnyModule(nn::ConvTranspose2d(
          nn::ConvTranspose2dOptions(layer.in_shape[0], layer.filters, {layer.kernel.h, layer.kernel.w})
              .stride({layer.stride.h, layer.stride.w})
              .padding({layer.padding.h, layer.padding.w})
              .bias(!followed_by_batchnorm)));
    case LayerKind::batchnorm:
      if (layer.in_shape.size() == 3) return nn::AnyModule(nn::BatchNorm2d(layer.in_shape[0]));
      return nn::AnyModule(nn::BatchNorm1d(layer.in_shape[0]));
    case LayerKind::leaky_relu:
      return nn::AnyModule(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(layer.alpha)));
    case LayerKind::reshape: {
      const Shape target = layer.out_shape;
      return nn::AnyModule(nn::Functional([target](const torch::Tensor& t) {
        std::vector<std::int64_t> dims{t.size(0)};
        dims.insert(dims.end(), target.begin(), target.end());
        return t.reshape(dims);
      }));
    }
    case LayerKind::linear:
      return nn::AnyModule(nn::Linear(layer.in_shape[0], layer.filters));
    case LayerKind::tanh:
      return nn::AnyModule(nn::Tanh());
  }
  throw Error("unknown layer kind");
}

}  // namespace

NetworkImpl::NetworkImpl(NetworkSpec spec) : spec_(std::move(spec)) {
  for (std::size_t n = 0; n < spec_.layers.size(); ++n) {
    const bool bn_next = n + 1 < spec_.layers.size() && spec_.layers[n + 1].kind == LayerKind::batchnorm;
    auto layer = make_layer(spec_.layers[n], bn_next);
    register_module("layer" + std::to_string(n), layer.ptr());
    layers_.push_back(std::move(layer));
  }
}

torch::Tensor NetworkImpl::run(torch::Tensor x, std::size_t stop, torch::Tensor* feature_out) {
  for (std::size_t n = 0; n < stop; ++n) {
    x = layers_[n].forward(x);
    if (feature_out && spec_.feature_layer && n == *spec_.feature_layer) *feature_out = x;
  }
  return x;
}

torch::Tensor NetworkImpl::forward(torch::Tensor x) { return run(std::move(x), layers_.size(), nullptr); }

torch::Tensor NetworkImpl::features(torch::Tensor x) {
  if (!spec_.feature_layer) throw Error("network has no feature layer");
  return run(std::move(x), *spec_.feature_layer + 1, nullptr);
}

std::pair<torch::Tensor, torch::Tensor> NetworkImpl::forward_with_features(torch::Tensor x) {
  if (!spec_.feature_layer) throw Error("network has no feature layer");
  torch::Tensor f;
  auto out = run(std::move(x), layers_.size(), &f);
  return {out, f};
}

Network make_network(Role role, std::int64_t frame_width) { return Network(build_network(role, frame_width)); }

Network clone_network(const Network& net) {
  Network copy(net->spec());
  load_params(*copy, save_params(*net));
  copy->train(net->is_training());
  return copy;
}

void set_requires_grad(torch::nn::Module& module, bool requires_grad) {
  for (auto& p : module.parameters()) p.set_requires_grad(requires_grad);
}

torch::Tensor frames_to_tensor(std::span<const rfdata::IQFrame> frames) {
  if (frames.empty()) throw Error("no frames to stack");
  const auto width = static_cast<std::int64_t>(frames.front().width());
  auto out = torch::empty({static_cast<std::int64_t>(frames.size()), 1, 2, width}, torch::kFloat32);
  auto* dst = out.data_ptr<float>();
  for (const auto& f : frames) {
    if (static_cast<std::int64_t>(f.width()) != width) throw Error("frames differ in width");
    std::copy(f.samples().begin(), f.samples().end(), dst);
    dst += f.size();
  }
  return out;
}

torch::Tensor sample_latent(std::int64_t n, std::int64_t dim) {
  return torch::rand({n, dim}) * 2.0 - 1.0;
}

}  // namespace rfanogan::models
