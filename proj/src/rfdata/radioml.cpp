#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rfanogan/error.hpp"
#include "rfanogan/pickle.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::rfdata {
namespace {

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& why) {
  throw Error("malformed container: " + path.string() + ": " + why);
}

template <typename Word>
Word load_word(const char* p, bool big_endian) {
  Word w{};
  std::memcpy(&w, p, sizeof(Word));
  if (big_endian != (std::endian::native == std::endian::big)) {
    auto* b = reinterpret_cast<unsigned char*>(&w);
    std::reverse(b, b + sizeof(Word));
  }
  return w;
}

std::vector<float> array_values(const pickle::NdArray& arr, const std::filesystem::path& path) {
  const bool big = arr.byte_order == '>';
  std::size_t count = 1;
  for (auto d : arr.shape) count *= static_cast<std::size_t>(d);
  std::vector<float> out(count);
  if (arr.dtype == "f4") {
    if (arr.data.size() != count * 4) malformed(path, "ndarray payload size mismatch");
    for (std::size_t k = 0; k < count; ++k) out[k] = std::bit_cast<float>(load_word<std::uint32_t>(arr.data.data() + 4 * k, big));
  } else if (arr.dtype == "f8") {
    if (arr.data.size() != count * 8) malformed(path, "ndarray payload size mismatch");
    for (std::size_t k = 0; k < count; ++k) {
      out[k] = static_cast<float>(std::bit_cast<double>(load_word<std::uint64_t>(arr.data.data() + 8 * k, big)));
    }
  } else {
    malformed(path, "unsupported ndarray dtype " + arr.dtype);
  }
  return out;
}

std::size_t table_rank(std::string_view modulation) {
  return static_cast<std::size_t>(std::ranges::find(kRadioMlModulations, modulation) - kRadioMlModulations.begin());
}

}  // namespace

RFDataset read_radioml_pickle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty()) malformed(path, "empty file");

  const pickle::Value root = pickle::parse(bytes);
  if (root.kind != pickle::Value::Kind::dict) malformed(path, "top-level object is not a dict");

  struct Group {
    std::string modulation;
    int snr;
    const pickle::NdArray* array;
  };
  std::vector<Group> groups;
  for (const auto& [key, value] : *root.dict) {
    if (key.kind != pickle::Value::Kind::tuple || key.items->size() != 2) malformed(path, "dict key is not a (modulation, snr) tuple");
    const auto& mod = (*key.items)[0];
    const auto& snr = (*key.items)[1];
    if (!mod.is_string() || snr.kind != pickle::Value::Kind::integer) malformed(path, "dict key has wrong types");
    if (std::ranges::find(kRadioMlModulations, mod.str) == kRadioMlModulations.end()) {
      throw Error("unknown modulation: " + mod.str);
    }
    if (value.kind != pickle::Value::Kind::ndarray) malformed(path, "dict value is not an ndarray");
    groups.push_back({mod.str, static_cast<int>(snr.integer), value.array.get()});
  }
  std::ranges::sort(groups, [](const Group& a, const Group& b) {
    const auto ra = table_rank(a.modulation);
    const auto rb = table_rank(b.modulation);
    return ra != rb ? ra < rb : a.snr < b.snr;
  });

  std::size_t width = 0;
  std::vector<SampleRecord> records;
  for (const auto& g : groups) {
    const auto& arr = *g.array;
    if (arr.shape.size() != 3 || arr.shape[1] != 2) {
      throw Error("frame shape not (2, W): group " + g.modulation + "/" + std::to_string(g.snr));
    }
    if (arr.fortran_order) malformed(path, "fortran-ordered arrays are not supported");
    const auto w = static_cast<std::size_t>(arr.shape[2]);
    if (width == 0) width = w;
    if (w != width) throw Error("frame shape not (2, W): inconsistent frame widths in " + path.string());
    const auto values = array_values(arr, path);
    const auto frames = static_cast<std::size_t>(arr.shape[0]);
    for (std::size_t n = 0; n < frames; ++n) {
      std::vector<float> samples(values.begin() + static_cast<std::ptrdiff_t>(n * 2 * w),
                                 values.begin() + static_cast<std::ptrdiff_t>((n + 1) * 2 * w));
      records.push_back({IQFrame(w, std::move(samples)), g.modulation, g.snr});
    }
  }
  if (records.empty()) malformed(path, "no frames");
  return RFDataset(std::move(records), width, path.string());
}

}  // namespace rfanogan::rfdata
