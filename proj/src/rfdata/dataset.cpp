#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "rfanogan/error.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::rfdata {

RFDataset::RFDataset(std::vector<SampleRecord> records, std::size_t frame_width,
                     std::string provenance)
    : records_(std::move(records)), frame_width_(frame_width), provenance_(std::move(provenance)) {
  if (frame_width_ < kMinFrameWidth) {
    throw Error("frame shape not (2, W): dataset width " + std::to_string(frame_width_));
  }
  for (std::size_t n = 0; n < records_.size(); ++n) {
    if (records_[n].frame.width() != frame_width_) {
      throw Error("frame shape not (2, W): record " + std::to_string(n) + " has width " +
                  std::to_string(records_[n].frame.width()) + ", dataset width " +
                  std::to_string(frame_width_));
    }
  }
}

std::vector<std::string> RFDataset::modulations() const {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& r : records_) {
    if (seen.insert(r.modulation).second) names.push_back(r.modulation);
  }
  return names;
}

std::vector<int> RFDataset::snrs() const {
  std::set<int> values;
  for (const auto& r : records_) values.insert(r.snr_db);
  return {values.begin(), values.end()};
}

std::map<GroupKey, std::size_t> RFDataset::group_counts() const {
  std::map<GroupKey, std::size_t> counts;
  for (const auto& r : records_) ++counts[{r.modulation, r.snr_db}];
  return counts;
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "public-serialized-map" || name == "radioml") return DatasetFormat::public_serialized_map;
  if (name == "neutral-container" || name == "rfds") return DatasetFormat::neutral_container;
  throw Error("unknown dataset format: " + std::string(name));
}

std::string_view to_string(DatasetFormat format) {
  return format == DatasetFormat::public_serialized_map ? "public-serialized-map"
                                                        : "neutral-container";
}

RFDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
  return format == DatasetFormat::neutral_container ? read_container(path)
                                                    : read_radioml_pickle(path);
}

std::size_t AnomalySplit::test_inlier_count() const {
  return static_cast<std::size_t>(
      std::ranges::count_if(test, [](const LabeledFrame& f) { return !f.outlier; }));
}

std::size_t AnomalySplit::test_outlier_count() const {
  return test.size() - test_inlier_count();
}

AnomalySplit make_anomaly_split(const RFDataset& dataset, std::string_view inlier, double train_frac,
                                int snr_min, std::uint64_t seed) {
  require_known_modulation(inlier);
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error("train_frac out of range (0, 1): " + std::to_string(train_frac));
  }

  std::vector<std::size_t> inlier_idx;
  std::vector<std::size_t> eligible;
  const auto& records = dataset.records();
  for (std::size_t n = 0; n < records.size(); ++n) {
    if (records[n].snr_db < snr_min) continue;
    eligible.push_back(n);
    if (records[n].modulation == inlier) inlier_idx.push_back(n);
  }
  if (inlier_idx.empty()) {
    throw Error("unknown modulation: " + std::string(inlier) + " not present in dataset");
  }
  if (inlier_idx.size() < 2) {
    throw Error("too few inliers: need at least 2 frames of " + std::string(inlier) + " with snr >= " +
                std::to_string(snr_min));
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order = inlier_idx;
  std::shuffle(order.begin(), order.end(), rng);

  auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(order.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, order.size() - 1);

  std::vector<bool> in_train(records.size(), false);
  AnomalySplit split;
  split.inlier_modulation = std::string(inlier);
  split.seed = seed;
  split.train.reserve(n_train);
  for (std::size_t k = 0; k < n_train; ++k) {
    in_train[order[k]] = true;
    split.train.push_back(records[order[k]].frame);
  }
  split.test.reserve(eligible.size() - n_train);
  for (std::size_t n : eligible) {
    if (in_train[n]) continue;
    const auto& r = records[n];
    split.test.push_back({r.frame, r.modulation != inlier, r.modulation, r.snr_db});
  }
  return split;
}

}  // namespace rfanogan::rfdata
