#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <json.hpp>

#include "rfanogan/error.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::rfdata {
namespace {

constexpr std::string_view kMagic = "RFDS1\n";

void put_float_le(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xFF));
}

float get_float_le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

[[noreturn]] void malformed(const std::filesystem::path& path, const std::string& why) {
  throw Error("malformed container: " + path.string() + ": " + why);
}

}  // namespace

void write_container(const RFDataset& dataset, const std::filesystem::path& path) {
  const auto modulations = dataset.modulations();
  const auto snrs = dataset.snrs();
  if (modulations.size() > 256 || snrs.size() > 256) {
    throw Error("container index tables hold at most 256 modulations and 256 snr values");
  }

  nlohmann::json header = {{"frame_width", dataset.frame_width()},
                           {"n_records", dataset.size()},
                           {"modulations", modulations},
                           {"snrs", snrs}};

  std::string payload;
  payload.reserve(dataset.size() * (dataset.frame_width() * 8 + 2));
  for (const auto& r : dataset.records()) {
    for (float v : r.frame.samples()) put_float_le(payload, v);
  }
  for (const auto& r : dataset.records()) {
    const auto mod = std::ranges::find(modulations, r.modulation) - modulations.begin();
    const auto snr = std::ranges::find(snrs, r.snr_db) - snrs.begin();
    payload.push_back(static_cast<char>(mod));
    payload.push_back(static_cast<char>(snr));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << kMagic << header.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error("write failed: " + path.string());
}

RFDataset read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < kMagic.size() || std::string_view(bytes).substr(0, kMagic.size()) != kMagic) {
    malformed(path, "bad magic");
  }
  const auto header_end = bytes.find('\n', kMagic.size());
  if (header_end == std::string::npos) malformed(path, "unterminated header");

  std::size_t width = 0;
  std::size_t n_records = 0;
  std::vector<std::string> modulations;
  std::vector<int> snrs;
  try {
    const auto header = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(kMagic.size()),
                                              bytes.begin() + static_cast<std::ptrdiff_t>(header_end));
    width = header.at("frame_width").get<std::size_t>();
    n_records = header.at("n_records").get<std::size_t>();
    modulations = header.at("modulations").get<std::vector<std::string>>();
    snrs = header.at("snrs").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    malformed(path, std::string("bad header: ") + e.what());
  }
  for (const auto& m : modulations) require_known_modulation(m);
  if (width < kMinFrameWidth) {
    throw Error("frame shape not (2, W): container frame_width " + std::to_string(width));
  }

  const std::size_t floats_per_frame = 2 * width;
  const std::size_t body = bytes.size() - header_end - 1;
  if (n_records > body / (floats_per_frame * 4 + 2) ||
      body != n_records * (floats_per_frame * 4 + 2)) {
    malformed(path, "payload size does not match header");
  }

  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data()) + header_end + 1;
  const auto* labels = base + n_records * floats_per_frame * 4;
  std::vector<SampleRecord> records;
  records.reserve(n_records);
  for (std::size_t n = 0; n < n_records; ++n) {
    std::vector<float> samples(floats_per_frame);
    const auto* p = base + n * floats_per_frame * 4;
    for (std::size_t k = 0; k < floats_per_frame; ++k) samples[k] = get_float_le(p + 4 * k);
    const unsigned mod = labels[2 * n];
    const unsigned snr = labels[2 * n + 1];
    if (mod >= modulations.size() || snr >= snrs.size()) malformed(path, "label index out of range");
    records.push_back({IQFrame(width, std::move(samples)), modulations[mod], snrs[snr]});
  }
  return RFDataset(std::move(records), width, path.string());
}

}  // namespace rfanogan::rfdata
