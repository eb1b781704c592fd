#include "rfanogan/network_spec.hpp"

#include <functional>
#include <numeric>
#include <sstream>

#include "rfanogan/error.hpp"

namespace rfanogan::models {
namespace {

std::int64_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::int64_t{1}, std::multiplies<>());
}

std::string extent_string(Extent e) {
  return "(" + std::to_string(e.h) + "," + std::to_string(e.w) + ")";
}

std::int64_t conv_extent(std::int64_t in, std::int64_t k, std::int64_t s, std::int64_t p) {
  const std::int64_t span = in + 2 * p - k;
  return span < 0 ? 0 : span / s + 1;
}

std::int64_t tconv_extent(std::int64_t in, std::int64_t k, std::int64_t s, std::int64_t p) {
  return (in - 1) * s - 2 * p + k;
}

}  // namespace

std::string shape_string(const Shape& per_sample, bool with_batch) {
  std::string out = with_batch ? "(N" : "(";
  for (std::size_t n = 0; n < per_sample.size(); ++n) {
    if (with_batch || n > 0) out += ",";
    out += std::to_string(per_sample[n]);
  }
  return out + ")";
}

Role parse_role(std::string_view name) {
  for (auto r : {Role::generator, Role::critic, Role::encoder, Role::cae, Role::custom}) {
    if (name == to_string(r)) return r;
  }
  throw Error("unsupported role: " + std::string(name));
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::generator: return "generator";
    case Role::critic: return "critic";
    case Role::encoder: return "encoder";
    case Role::cae: return "cae";
    case Role::custom: return "custom";
  }
  return "custom";
}

std::int64_t NetworkSpec::feature_width() const {
  if (!feature_layer) throw Error("network has no feature layer");
  return numel(layers.at(*feature_layer).out_shape);
}

Shape layer_output_shape(const LayerSpec& layer, const Shape& in, std::size_t index) {
  switch (layer.kind) {
    case LayerKind::conv2d:
    case LayerKind::tconv2d: {
      if (in.size() != 3) throw ShapeError(index, "convolution expects (C,H,W), got " + shape_string(in));
      const bool forward = layer.kind == LayerKind::conv2d;
      const auto h = forward ? conv_extent(in[1], layer.kernel.h, layer.stride.h, layer.padding.h)
                             : tconv_extent(in[1], layer.kernel.h, layer.stride.h, layer.padding.h);
      const auto w = forward ? conv_extent(in[2], layer.kernel.w, layer.stride.w, layer.padding.w)
                             : tconv_extent(in[2], layer.kernel.w, layer.stride.w, layer.padding.w);
      if (h < 1 || w < 1) {
        throw ShapeError(index, "kernel " + extent_string(layer.kernel) + " does not fit input " + shape_string(in));
      }
      return {layer.filters, h, w};
    }
    case LayerKind::batchnorm:
      if (in.size() != 1 && in.size() != 3) throw ShapeError(index, "batch normalization expects (C) or (C,H,W)");
      return in;
    case LayerKind::leaky_relu:
    case LayerKind::tanh:
      return in;
    case LayerKind::reshape:
      if (numel(in) != numel(layer.out_shape)) {
        throw ShapeError(index, "cannot reshape " + shape_string(in) + " to " + shape_string(layer.out_shape));
      }
      return layer.out_shape;
    case LayerKind::linear:
      if (in.size() != 1) throw ShapeError(index, "linear layer expects a flat input, got " + shape_string(in));
      return {layer.filters};
  }
  throw ShapeError(index, "unknown layer kind");
}

SpecBuilder::SpecBuilder(Shape input) : current_(std::move(input)) {}

SpecBuilder& SpecBuilder::add(LayerSpec layer) {
  layer.in_shape = current_;
  layer.out_shape = layer_output_shape(layer, current_, layers_.size());
  current_ = layer.out_shape;
  layers_.push_back(std::move(layer));
  return *this;
}

SpecBuilder& SpecBuilder::conv(std::int64_t filters, Extent kernel, Extent stride, Extent padding) {
  return add({.kind = LayerKind::conv2d, .filters = filters, .kernel = kernel, .stride = stride, .padding = padding});
}

SpecBuilder& SpecBuilder::tconv(std::int64_t filters, Extent kernel, Extent stride, Extent padding) {
  return add({.kind = LayerKind::tconv2d, .filters = filters, .kernel = kernel, .stride = stride, .padding = padding});
}

SpecBuilder& SpecBuilder::batchnorm() { return add({.kind = LayerKind::batchnorm}); }

SpecBuilder& SpecBuilder::leaky_relu(double alpha) { return add({.kind = LayerKind::leaky_relu, .alpha = alpha}); }

SpecBuilder& SpecBuilder::reshape(Shape target) {
  LayerSpec layer{.kind = LayerKind::reshape};
  layer.out_shape = std::move(target);
  return add(std::move(layer));
}

SpecBuilder& SpecBuilder::linear(std::int64_t out_features) {
  return add({.kind = LayerKind::linear, .filters = out_features});
}

SpecBuilder& SpecBuilder::tanh() { return add({.kind = LayerKind::tanh}); }

SpecBuilder& SpecBuilder::mark_features() {
  if (layers_.empty()) throw Error("mark_features() before any layer");
  feature_layer_ = layers_.size() - 1;
  return *this;
}

NetworkSpec SpecBuilder::build(Role role, std::int64_t latent_dim, std::int64_t frame_width) const {
  if (layers_.empty()) throw Error("network spec without layers");
  return {role, layers_, latent_dim, frame_width, feature_layer_};
}

NetworkSpec build_network(Role role, std::int64_t frame_width) {
  constexpr Extent kKernel{2, 4};
  constexpr Extent kStride{2, 2};
  constexpr Extent kPad{1, 1};
  constexpr Extent kNoPad{0, 0};
  const std::int64_t W = frame_width;

  auto require_multiple = [&](std::int64_t m) {
    if (W < m || W % m != 0) {
      throw Error("frame width " + std::to_string(W) + " cannot compose for " + std::string(to_string(role)) +
                  " (needs a positive multiple of " + std::to_string(m) + ")");
    }
  };

  // Shared by the encoder and the CAE: six stride-2 convolutions taking
  // (1,2,W) to (1024,2,W/64).
  auto downsampling_stack = [&](SpecBuilder& b) {
    b.conv(64, kKernel, kStride, kPad).leaky_relu();
    for (std::int64_t filters : {64, 128, 256, 512}) b.conv(filters, kKernel, kStride, kPad).batchnorm().leaky_relu();
    b.conv(1024, kKernel, kStride, kPad);
  };

  switch (role) {
    case Role::generator: {
      require_multiple(32);
      SpecBuilder b({kLatentDim});
      b.reshape({kLatentDim, 1, 1});
      // First kernel width W/32 lands on (1024,2,W/32); five doublings reach W.
      b.tconv(1024, {2, W / 32}, {1, 1}, kNoPad).batchnorm().leaky_relu();
      for (std::int64_t filters : {512, 256, 128, 64}) b.tconv(filters, kKernel, kStride, kPad).batchnorm().leaky_relu();
      b.tconv(1, kKernel, kStride, kPad);
      return b.build(role, kLatentDim, W);
    }
    case Role::critic: {
      require_multiple(32);
      SpecBuilder b({1, 2, W});
      b.conv(64, kKernel, kStride, kPad).leaky_relu();
      for (std::int64_t filters : {128, 256, 512}) b.conv(filters, kKernel, kStride, kPad).batchnorm().leaky_relu();
      b.conv(1024, kKernel, kStride, kPad);
      b.reshape({1024 * 2 * (W / 32)}).mark_features();
      b.linear(1);
      return b.build(role, kLatentDim, W);
    }
    case Role::encoder: {
      require_multiple(64);
      SpecBuilder b({1, 2, W});
      downsampling_stack(b);
      b.reshape({1024 * 2 * (W / 64)});
      b.linear(kLatentDim).tanh();
      return b.build(role, kLatentDim, W);
    }
    case Role::cae: {
      require_multiple(64);
      SpecBuilder b({1, 2, W});
      downsampling_stack(b);
      const std::int64_t flat = 1024 * 2 * (W / 64);
      b.reshape({flat}).linear(kLatentDim);
      b.linear(flat).reshape({1024, 2, W / 64});
      constexpr Extent kUpKernel{1, 2};
      for (std::int64_t filters : {512, 256, 128, 64}) b.tconv(filters, kUpKernel, kUpKernel, kNoPad).leaky_relu().batchnorm();
      b.tconv(64, kUpKernel, kUpKernel, kNoPad).leaky_relu();
      b.tconv(1, kUpKernel, kUpKernel, kNoPad);
      return b.build(role, kLatentDim, W);
    }
    case Role::custom: break;
  }
  throw Error("unsupported role: " + std::string(to_string(role)));
}

std::vector<Shape> infer_shapes(const NetworkSpec& spec, const Shape& input_shape) {
  if (spec.layers.empty()) throw Error("network spec without layers");
  if (input_shape.size() != spec.input_shape().size() + 1) {
    throw ShapeError(0, "input rank " + std::to_string(input_shape.size()) + " does not match " +
                            shape_string(spec.input_shape()));
  }
  const std::int64_t batch = input_shape.front();
  Shape current(input_shape.begin() + 1, input_shape.end());
  std::vector<Shape> shapes;
  shapes.reserve(spec.layers.size());
  for (std::size_t n = 0; n < spec.layers.size(); ++n) {
    const auto& layer = spec.layers[n];
    if (current != layer.in_shape) {
      throw ShapeError(n, "layer expects " + shape_string(layer.in_shape) + ", got " + shape_string(current));
    }
    current = layer_output_shape(layer, current, n);
    Shape batched{batch};
    batched.insert(batched.end(), current.begin(), current.end());
    shapes.push_back(std::move(batched));
  }
  return shapes;
}

std::string to_listing(const NetworkSpec& spec) {
  std::ostringstream out;
  auto filters = [](std::int64_t n) { return std::to_string(n) + (n == 1 ? " filter" : " filters"); };
  auto padding = [](Extent p) { return p == Extent{0, 0} ? std::string("no padding") : "padding " + extent_string(p); };
  for (const auto& layer : spec.layers) {
    switch (layer.kind) {
      case LayerKind::conv2d:
      case LayerKind::tconv2d:
        out << (layer.kind == LayerKind::conv2d ? "2D convolution layer" : "2D transposed convolution layer") << " | "
            << filters(layer.filters) << ", kernel size of " << extent_string(layer.kernel) << ", stride of "
            << extent_string(layer.stride) << ", " << padding(layer.padding);
        break;
      case LayerKind::batchnorm: out << "Batch normalization |"; break;
      case LayerKind::leaky_relu: {
        std::ostringstream a;
        a << layer.alpha;
        out << "Leaky-ReLU | alpha=" << a.str();
        break;
      }
      case LayerKind::reshape:
        out << "Reshape layer | " << shape_string(layer.in_shape) << " to " << shape_string(layer.out_shape);
        break;
      case LayerKind::linear: {
        const auto in = layer.in_shape.front();
        out << "Linear layer | " << in << (in == 1 ? " neuron" : " neurons") << " to " << layer.filters
            << (layer.filters == 1 ? " neuron" : " neurons");
        break;
      }
      case LayerKind::tanh: out << "Tanh |"; break;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rfanogan::models
