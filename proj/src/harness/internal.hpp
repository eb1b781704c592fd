#pragma once

#include <json.hpp>

#include "rfanogan/harness.hpp"

namespace rfanogan::harness::detail {

struct PreparedSplit {
  rfdata::AnomalySplit split;
  torch::Tensor train;
  torch::Tensor test;
  std::vector<int> labels;  // 1 = outlier
};

PreparedSplit prepare_split(const rfdata::RFDataset& dataset, const std::string& modulation,
                            const SplitParams& params);

std::string_view to_string(training::FeatureSpace space);
training::FeatureSpace parse_feature_space(std::string_view name);

nlohmann::json record_to_json(const ExperimentRecord& record);
ExperimentRecord record_from_json(const nlohmann::json& j);
nlohmann::json manifest_json(const ExperimentRecord& record);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rfanogan::harness::detail
