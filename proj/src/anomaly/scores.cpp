#include <algorithm>
#include <charconv>
#include <cmath>

#include "rfanogan/anomaly.hpp"
#include "rfanogan/error.hpp"

namespace rfanogan::anomaly {
namespace {

double mean_squared(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError(0, "operands of different length");
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += (a[n] - b[n]) * (a[n] - b[n]);
  return s / static_cast<double>(a.size());
}

void check_frame_width(const models::Network& encoder, std::int64_t width) {
  const auto& in = encoder->spec().input_shape();
  if (in.size() != 3 || in[2] != width) {
    throw ShapeError(0, "frame width " + std::to_string(width) + " does not fit encoder input " +
                            models::shape_string(in));
  }
}

// Per-sample mean over all non-batch dimensions.
torch::Tensor per_sample_mse(const torch::Tensor& a, const torch::Tensor& b) {
  return (a - b).to(torch::kFloat64).square().reshape({a.size(0), -1}).mean(1);
}

std::string format_number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

}  // namespace

AnomalyScore fanogan_score_from_parts(std::span<const double> x, std::span<const double> recon,
                                      std::span<const double> f_x, std::span<const double> f_recon,
                                      double kappa) {
  return {mean_squared(x, recon) + kappa * mean_squared(f_x, f_recon), std::nullopt};
}

std::vector<double> fanogan_scores(const torch::Tensor& frames, models::Network& generator,
                                   models::Network& encoder, models::Network& critic, double kappa) {
  if (frames.dim() != 4) throw ShapeError(0, "expected frames of shape (N, 1, 2, W)");
  check_frame_width(encoder, frames.size(3));
  torch::NoGradGuard no_grad;
  generator->eval();
  encoder->eval();
  critic->eval();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(frames.size(0)));
  constexpr std::int64_t kChunk = 256;
  for (std::int64_t start = 0; start < frames.size(0); start += kChunk) {
    const auto x = frames.slice(0, start, std::min(frames.size(0), start + kChunk)).to(torch::kFloat32);
    const auto recon = generator->forward(encoder->forward(x));
    const auto score = per_sample_mse(x, recon) + kappa * per_sample_mse(critic->features(x), critic->features(recon));
    const auto s = score.contiguous();
    out.insert(out.end(), s.data_ptr<double>(), s.data_ptr<double>() + s.numel());
  }
  return out;
}

AnomalyScore fanogan_score(const rfdata::IQFrame& x, models::Network& generator, models::Network& encoder,
                           models::Network& critic, double kappa) {
  return {fanogan_scores(models::frames_to_tensor({&x, 1}), generator, encoder, critic, kappa).front(),
          std::nullopt};
}

NormalizedScores normalize_scores(std::span<const double> raw) {
  if (raw.empty()) throw Error("normalize_scores: empty score list");
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  NormalizedScores out;
  out.values.resize(raw.size(), 0.0);
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t n = 0; n < raw.size(); ++n) out.values[n] = (raw[n] - *lo) / range;
  return out;
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::outlier ? "outlier" : "inlier"; }

Detection detect(const AnomalyScore& score, double tau) {
  if (!std::isfinite(tau)) throw Error("detect: non-finite threshold");
  if (!std::isfinite(score.raw)) throw Error("detect: non-finite score");
  return {score.raw > tau ? Verdict::outlier : Verdict::inlier, score, tau};
}

Detection cae_score_and_classify(const rfdata::IQFrame& x, training::CaeModel& model) {
  const auto& in = model.network->spec().input_shape();
  if (in.size() != 3 || in[2] != static_cast<std::int64_t>(x.width())) {
    throw ShapeError(0, "frame width " + std::to_string(x.width()) + " does not fit CAE input " +
                            models::shape_string(in));
  }
  const double raw = training::reconstruction_errors(model.network, models::frames_to_tensor({&x, 1})).front();
  return detect({raw, std::nullopt}, model.threshold);
}

void write_score_csv(std::ostream& out, std::span<const ScoreRow> rows) {
  out << "frame_index,modulation,snr_db,raw_score,normalized_score,verdict\n";
  for (const auto& r : rows) {
    out << r.frame_index << ',' << r.modulation << ',' << r.snr_db << ',' << format_number(r.raw) << ','
        << (r.normalized ? format_number(*r.normalized) : std::string()) << ',' << to_string(r.verdict) << '\n';
  }
}

}  // namespace rfanogan::anomaly
