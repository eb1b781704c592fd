#pragma once

// Detector metrics (ROC/AUROC, confusion-matrix ratios) and the generative
// fidelity/diversity measures used to pick GAN checkpoints.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfanogan::metrics {

// Points of the ROC curve obtained by declaring "outlier" when score > threshold.
// thresholds descend from the largest score (curve point (0,0)) to -infinity
// (curve point (1,1)).
struct RocResult {
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auroc = 0.0;
};

// labels: 1 = outlier (positive), 0 = inlier. AUROC is the Mann-Whitney
// statistic with ties counted as one half.
RocResult auroc(std::span<const double> scores, std::span<const int> labels);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

ClassificationMetrics classification_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                                             std::uint64_t fn);

// Row-major batch of equally sized feature vectors.
class FeatureBatch {
 public:
  FeatureBatch() = default;
  FeatureBatch(std::size_t dim, std::vector<double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::span<const double> row(std::size_t n) const { return {values_.data() + n * dim_, dim_}; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

inline constexpr std::size_t kDefaultNearestK = 5;
inline constexpr std::size_t kDefaultJsdBins = 50;

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

struct DensityCoverage {
  double density = 0.0;
  double coverage = 0.0;
};

// k-NN manifold estimates. A point lies inside a k-NN ball when its distance
// to the centre is <= the centre's distance to its k-th nearest neighbour in
// its own set (the centre itself excluded).
double generative_precision(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k);
double generative_recall(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k);
PrecisionRecall generative_pr(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k);
DensityCoverage density_coverage(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k);

struct JsdOptions {
  std::size_t bins = kDefaultJsdBins;
  // Split each feature vector into this many contiguous groups, histogram
  // each group separately and average the distances.
  std::size_t groups = 1;
};

// Base-2 Jensen-Shannon divergence of two histograms (normalised internally).
double js_divergence(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon distance (square root of the base-2 divergence) between the
// value histograms of two batches, in [0, 1].
double jsd(const FeatureBatch& real, const FeatureBatch& fake, const JsdOptions& options = {});

enum class FidelityMeasure { s_rp, h_rp, s_dc, h_dc, jsd };

inline constexpr FidelityMeasure kAllMeasures[] = {FidelityMeasure::s_rp, FidelityMeasure::h_rp,
                                                   FidelityMeasure::s_dc, FidelityMeasure::h_dc,
                                                   FidelityMeasure::jsd};

FidelityMeasure parse_measure(std::string_view name);
std::string_view to_string(FidelityMeasure measure);
// JSD is minimised, the others are maximised.
bool lower_is_better(FidelityMeasure measure);
// True when `candidate` is strictly better than `incumbent` under `measure`.
bool improves(FidelityMeasure measure, double candidate, double incumbent);

struct FidelityReport {
  double precision = 0.0;
  double recall = 0.0;
  double density = 0.0;
  double coverage = 0.0;
  double jsd = 0.0;
  double s_rp = 0.0;
  double h_rp = 0.0;
  double s_dc = 0.0;
  double h_dc = 0.0;

  double value(FidelityMeasure measure) const;

  static std::string csv_header();
  std::string to_csv() const;
  static FidelityReport from_csv(std::string_view line);
};

FidelityReport combine_fidelity(double precision, double recall, double density, double coverage,
                                double jsd);

struct FidelityOptions {
  std::size_t k = kDefaultNearestK;
  JsdOptions jsd;
};

FidelityReport evaluate_fidelity(const FeatureBatch& real, const FeatureBatch& fake,
                                 const FidelityOptions& options = {});

}  // namespace rfanogan::metrics
