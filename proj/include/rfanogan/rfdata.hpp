#pragma once

// I/Q frame datasets: loading, validation, normalisation, inlier/outlier
// splitting and a small synthetic waveform generator.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rfanogan::rfdata {

// The eleven RadioML 2016.10a modulation classes, in results-table order.
inline constexpr std::array<std::string_view, 11> kRadioMlModulations = {
    "AM-DSB", "AM-SSB", "BPSK", "8PSK", "CPFSK", "GFSK", "PAM4", "QAM16", "QAM64", "QPSK", "WBFM"};

// Waveform classes produced by synth_dataset().
inline constexpr std::array<std::string_view, 5> kSynthClasses = {"tone", "bpsk", "qpsk", "fsk",
                                                                 "wideband-noise"};

inline constexpr std::size_t kMinFrameWidth = 8;
inline constexpr std::size_t kDefaultFrameWidth = 128;

// snr_db recorded for synthetic frames generated without additive noise.
inline constexpr int kNoiselessSnrDb = 1000;

bool is_known_modulation(std::string_view name);
// Throws Error("unknown modulation: <name>").
void require_known_modulation(std::string_view name);

// A 2 x W real frame: row 0 is in-phase, row 1 is quadrature. Stored row-major
// as float32, the precision of the public dataset and of the container format.
class IQFrame {
 public:
  IQFrame() = default;
  explicit IQFrame(std::size_t width);
  IQFrame(std::size_t width, std::vector<float> samples);

  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return samples_.size(); }

  std::span<const float> samples() const noexcept { return samples_; }
  std::span<const float> in_phase() const noexcept { return {samples_.data(), width_}; }
  std::span<const float> quadrature() const noexcept { return {samples_.data() + width_, width_}; }

  float i(std::size_t n) const { return samples_[n]; }
  float q(std::size_t n) const { return samples_[width_ + n]; }

  bool operator==(const IQFrame&) const = default;

 private:
  std::size_t width_ = 0;
  std::vector<float> samples_;
};

struct SampleRecord {
  IQFrame frame;
  std::string modulation;
  int snr_db = 0;

  bool operator==(const SampleRecord&) const = default;
};

using GroupKey = std::pair<std::string, int>;

// Immutable collection of records sharing one frame width.
class RFDataset {
 public:
  RFDataset() = default;
  RFDataset(std::vector<SampleRecord> records, std::size_t frame_width, std::string provenance);

  const std::vector<SampleRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t frame_width() const noexcept { return frame_width_; }
  const std::string& provenance() const noexcept { return provenance_; }

  // Distinct modulation names in order of first appearance.
  std::vector<std::string> modulations() const;
  // Distinct SNR values, ascending.
  std::vector<int> snrs() const;
  // Record count per (modulation, snr) group.
  std::map<GroupKey, std::size_t> group_counts() const;

  bool operator==(const RFDataset& other) const {
    return frame_width_ == other.frame_width_ && records_ == other.records_;
  }

 private:
  std::vector<SampleRecord> records_;
  std::size_t frame_width_ = 0;
  std::string provenance_;
};

enum class DatasetFormat { public_serialized_map, neutral_container };

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view to_string(DatasetFormat format);

RFDataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

// Neutral container: "RFDS1\n", one-line JSON header, float32 LE payload,
// then one (mod_index, snr_index) byte pair per record.
void write_container(const RFDataset& dataset, const std::filesystem::path& path);
RFDataset read_container(const std::filesystem::path& path);

// RadioML 2016.10a pickle: dict {(modulation, snr): ndarray[N, 2, W]}.
RFDataset read_radioml_pickle(const std::filesystem::path& path);

struct LabeledFrame {
  IQFrame frame;
  bool outlier = false;
  std::string modulation;
  int snr_db = 0;
};

struct AnomalySplit {
  std::string inlier_modulation;
  std::vector<IQFrame> train;
  std::vector<LabeledFrame> test;
  std::uint64_t seed = 0;

  std::size_t test_inlier_count() const;
  std::size_t test_outlier_count() const;
};

inline constexpr double kDefaultTrainFraction = 0.8;
inline constexpr int kDefaultSnrMin = -20;

AnomalySplit make_anomaly_split(const RFDataset& dataset, std::string_view inlier, double train_frac,
                                int snr_min, std::uint64_t seed);

enum class NormalizationPolicy { none, max_abs, unit_power };

NormalizationPolicy parse_normalization(std::string_view name);
std::string_view to_string(NormalizationPolicy policy);

IQFrame normalize_frame(const IQFrame& frame, NormalizationPolicy policy);

struct SynthSpec {
  std::vector<std::string> classes;
  std::size_t frames_per_class = 0;
  // +infinity disables the additive noise.
  double snr_db = 10.0;
  std::size_t width = kDefaultFrameWidth;
};

RFDataset synth_dataset(const SynthSpec& spec, std::uint64_t seed);

}  // namespace rfanogan::rfdata
