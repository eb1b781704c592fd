#include <cstring>
#include <fstream>
#include <iterator>

#include "rfanogan/error.hpp"
#include "rfanogan/hashing.hpp"
#include "rfanogan/network.hpp"

namespace rfanogan::models {
namespace {

constexpr std::string_view kMagic = "RFPB1\n";

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

class BlobReader {
 public:
  explicit BlobReader(const ParamBlob& blob) : blob_(blob) {}

  std::string_view take(std::uint64_t n) {
    if (n > blob_.size() - pos_) throw Error("parameter blob truncated");
    auto out = std::string_view(blob_).substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(k)]);
    return v;
  }

  bool done() const { return pos_ == blob_.size(); }

 private:
  const ParamBlob& blob_;
  std::size_t pos_ = 0;
};

// Parameters then buffers, prefixed so names cannot collide.
std::vector<std::pair<std::string, torch::Tensor>> named_state(const torch::nn::Module& module) {
  std::vector<std::pair<std::string, torch::Tensor>> state;
  for (const auto& item : module.named_parameters()) state.emplace_back("p:" + item.key(), item.value());
  for (const auto& item : module.named_buffers()) state.emplace_back("b:" + item.key(), item.value());
  return state;
}

}  // namespace

ParamBlob save_params(const torch::nn::Module& module) {
  ParamBlob out(kMagic);
  const auto state = named_state(module);
  put_u64(out, state.size());
  for (const auto& [name, tensor] : state) {
    const auto t = tensor.detach().contiguous().cpu();
    put_u64(out, name.size());
    out += name;
    put_u64(out, static_cast<std::uint64_t>(t.scalar_type()));
    put_u64(out, static_cast<std::uint64_t>(t.dim()));
    for (auto d : t.sizes()) put_u64(out, static_cast<std::uint64_t>(d));
    const auto bytes = static_cast<std::uint64_t>(t.numel()) * t.element_size();
    put_u64(out, bytes);
    out.append(static_cast<const char*>(t.data_ptr()), bytes);
  }
  return out;
}

void load_params(torch::nn::Module& module, const ParamBlob& blob) {
  if (std::string_view(blob).substr(0, kMagic.size()) != kMagic) throw Error("parameter blob has bad magic");
  BlobReader in(blob);
  in.take(kMagic.size());
  auto state = named_state(module);
  const auto count = in.u64();
  if (count != state.size()) throw Error("parameter blob does not match module layout");

  torch::NoGradGuard no_grad;
  for (auto& [name, tensor] : state) {
    const auto blob_name = in.take(in.u64());
    if (blob_name != name) throw Error("parameter blob entry " + std::string(blob_name) + " where " + name + " expected");
    const auto type = static_cast<c10::ScalarType>(in.u64());
    const auto dims = in.u64();
    std::vector<std::int64_t> sizes(dims);
    for (auto& d : sizes) d = static_cast<std::int64_t>(in.u64());
    if (type != tensor.scalar_type() || tensor.sizes() != c10::IntArrayRef(sizes)) {
      throw Error("parameter blob entry " + name + " has wrong shape or type");
    }
    const auto bytes = in.take(in.u64());
    if (bytes.size() != static_cast<std::size_t>(tensor.numel()) * tensor.element_size()) {
      throw Error("parameter blob entry " + name + " has wrong size");
    }
    auto src = torch::from_blob(const_cast<char*>(bytes.data()), sizes, torch::TensorOptions().dtype(type)).clone();
    tensor.copy_(src);
  }
  if (!in.done()) throw Error("parameter blob has trailing bytes");
}

std::string param_hash(const torch::nn::Module& module) { return sha256_hex(save_params(module)); }

void write_blob(const std::filesystem::path& path, const ParamBlob& blob) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error("write failed: " + path.string());
}

ParamBlob read_blob(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  return ParamBlob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace rfanogan::models
