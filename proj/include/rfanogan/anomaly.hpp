#pragma once

// Anomaly scores (f-AnoGAN, AnoGAN, GANomaly, CAE reconstruction) and the
// inlier/outlier decision.
//
// Reductions: squared norms are averaged over entries, L1 and L2 norms are
// plain sums as written.

#include <torch/torch.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfanogan/network.hpp"
#include "rfanogan/rfdata.hpp"
#include "rfanogan/training.hpp"

namespace rfanogan::anomaly {

inline constexpr double kDefaultKappa = 1.0;

struct AnomalyScore {
  double raw = 0.0;
  std::optional<double> normalized;
};

// mean (x - recon)^2 + kappa * mean (f(x) - f(recon))^2
AnomalyScore fanogan_score_from_parts(std::span<const double> x, std::span<const double> recon,
                                      std::span<const double> f_x, std::span<const double> f_recon,
                                      double kappa = kDefaultKappa);

// Single encoder pass, no latent search. Networks are switched to eval mode.
AnomalyScore fanogan_score(const rfdata::IQFrame& x, models::Network& generator, models::Network& encoder,
                           models::Network& critic, double kappa = kDefaultKappa);
// Raw scores for an (N, 1, 2, W) batch, evaluated in chunks.
std::vector<double> fanogan_scores(const torch::Tensor& frames, models::Network& generator,
                                   models::Network& encoder, models::Network& critic,
                                   double kappa = kDefaultKappa);

struct AnoganOptions {
  double lambda = 0.1;
  int steps = 100;
  double step_size = 0.01;
  std::uint64_t seed = 0;
  // Halve the step until the loss does not increase (up to 30 halvings).
  bool backtracking = false;
};

inline constexpr double kAnoganZeroLoss = 1e-12;

struct AnoganResult {
  AnomalyScore score;
  // L(z_1), then the loss after every performed step.
  std::vector<double> trace;
  torch::Tensor z;
  int steps_taken = 0;
};

// (1 - lambda) * sum |x - G(z)| + lambda * sum |f(x) - f(G(z))|, minimised over z
// by projected gradient descent on the prior's support. `x` carries a
// leading batch dimension of 1; z has the generator's input shape.
AnoganResult anogan_search(const torch::Tensor& x, models::Network& generator, models::Network& critic,
                           const AnoganOptions& options = {});
AnomalyScore anogan_score(const rfdata::IQFrame& x, models::Network& generator, models::Network& critic,
                          const AnoganOptions& options = {});

struct GanomalyWeights {
  double adversarial = 0.05;
  double contextual = 0.90;
  double encoder = 0.05;

  void validate() const;
};

struct GanomalyLosses {
  double adversarial = 0.0;  // ||f(x) - f(x_hat)||_2
  double contextual = 0.0;   // ||x - x_hat||_1
  double encoder = 0.0;      // ||z - z_hat||_2
  double total = 0.0;
};

GanomalyLosses ganomaly_losses(std::span<const double> x, std::span<const double> x_hat,
                               std::span<const double> z, std::span<const double> z_hat,
                               std::span<const double> f_x, std::span<const double> f_x_hat,
                               const GanomalyWeights& weights = {});

// ||G_E(x) - E(G(x))||_1 from the two latent codes.
AnomalyScore ganomaly_score(std::span<const double> z, std::span<const double> z_hat);

// G_E -> G_D -> E with a discriminator supplying f(.).
struct GanomalyModel {
  models::Network input_encoder{nullptr};
  models::Network decoder{nullptr};
  models::Network output_encoder{nullptr};
  models::Network discriminator{nullptr};
  std::vector<double> epoch_losses;
};

AnomalyScore ganomaly_score(const rfdata::IQFrame& x, GanomalyModel& model);
GanomalyModel train_ganomaly(const torch::Tensor& frames, const training::TrainingConfig& cfg,
                             const GanomalyWeights& weights = {});

struct NormalizedScores {
  std::vector<double> values;
  bool degenerate = false;  // all inputs equal; values are all zero
};

NormalizedScores normalize_scores(std::span<const double> raw);

enum class Verdict { inlier, outlier };
std::string_view to_string(Verdict verdict);

struct Detection {
  Verdict verdict = Verdict::inlier;
  AnomalyScore score;
  double threshold = 0.0;
};

// Outlier iff raw > tau.
Detection detect(const AnomalyScore& score, double tau);
Detection cae_score_and_classify(const rfdata::IQFrame& x, training::CaeModel& model);

struct ScoreRow {
  std::size_t frame_index = 0;
  std::string modulation;
  int snr_db = 0;
  double raw = 0.0;
  std::optional<double> normalized;
  Verdict verdict = Verdict::inlier;
};

// Header line then one line per row; an absent normalized score is empty.
void write_score_csv(std::ostream& out, std::span<const ScoreRow> rows);

}  // namespace rfanogan::anomaly
