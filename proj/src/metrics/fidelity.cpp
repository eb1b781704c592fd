#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "rfanogan/error.hpp"
#include "rfanogan/metrics.hpp"

namespace rfanogan::metrics {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double d = a[n] - b[n];
    s += d * d;
  }
  return s;
}

void check_batches(const FeatureBatch& a, const FeatureBatch& b) {
  if (a.dim() != b.dim()) throw Error("feature batches differ in dimension");
}

void check_knn_size(const FeatureBatch& batch, std::size_t k, const char* which) {
  if (k == 0) throw Error("k-NN metrics need k >= 1");
  if (batch.size() < k + 1) {
    throw Error(std::string("k-NN metrics need at least k+1 points in the ") + which + " batch (k=" +
                std::to_string(k) + ", got " + std::to_string(batch.size()) + ")");
  }
}

// Squared distance from every point to its k-th nearest neighbour in the same batch.
std::vector<double> knn_radii_sq(const FeatureBatch& batch, std::size_t k) {
  const std::size_t n = batch.size();
  std::vector<double> radii(n);
  std::vector<double> dist(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist[m++] = squared_distance(batch.row(i), batch.row(j));
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    radii[i] = dist[k - 1];
  }
  return radii;
}

// cross[i * fake + j] = squared distance between real i and fake j.
std::vector<double> cross_distances_sq(const FeatureBatch& real, const FeatureBatch& fake) {
  std::vector<double> d(real.size() * fake.size());
  for (std::size_t i = 0; i < real.size(); ++i) {
    for (std::size_t j = 0; j < fake.size(); ++j) d[i * fake.size() + j] = squared_distance(real.row(i), fake.row(j));
  }
  return d;
}

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

}  // namespace

FeatureBatch::FeatureBatch(std::size_t dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 && !values_.empty()) throw Error("feature batch with zero dimension");
  if (dim_ != 0 && values_.size() % dim_ != 0) throw Error("feature batch size is not a multiple of its dimension");
}

double generative_precision(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k) {
  check_batches(real, fake);
  check_knn_size(real, k, "real");
  if (fake.size() == 0) throw Error("k-NN metrics need a nonempty fake batch");
  const auto radii = knn_radii_sq(real, k);
  const auto cross = cross_distances_sq(real, fake);
  std::size_t inside = 0;
  for (std::size_t j = 0; j < fake.size(); ++j) {
    for (std::size_t i = 0; i < real.size(); ++i) {
      if (cross[i * fake.size() + j] <= radii[i]) {
        ++inside;
        break;
      }
    }
  }
  return static_cast<double>(inside) / static_cast<double>(fake.size());
}

double generative_recall(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k) {
  check_batches(real, fake);
  check_knn_size(fake, k, "fake");
  if (real.size() == 0) throw Error("k-NN metrics need a nonempty real batch");
  const auto radii = knn_radii_sq(fake, k);
  const auto cross = cross_distances_sq(real, fake);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    for (std::size_t j = 0; j < fake.size(); ++j) {
      if (cross[i * fake.size() + j] <= radii[j]) {
        ++inside;
        break;
      }
    }
  }
  return static_cast<double>(inside) / static_cast<double>(real.size());
}

PrecisionRecall generative_pr(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k) {
  check_knn_size(real, k, "real");
  check_knn_size(fake, k, "fake");
  return {generative_precision(real, fake, k), generative_recall(real, fake, k)};
}

DensityCoverage density_coverage(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k) {
  check_batches(real, fake);
  check_knn_size(real, k, "real");
  check_knn_size(fake, k, "fake");
  const auto radii = knn_radii_sq(real, k);
  const auto cross = cross_distances_sq(real, fake);

  std::size_t memberships = 0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < fake.size(); ++j) {
      if (cross[i * fake.size() + j] <= radii[i]) {
        ++memberships;
        any = true;
      }
    }
    covered += any ? 1 : 0;
  }
  DensityCoverage dc;
  dc.density = static_cast<double>(memberships) / (static_cast<double>(k) * static_cast<double>(fake.size()));
  dc.coverage = static_cast<double>(covered) / static_cast<double>(real.size());
  return dc;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) throw Error("js_divergence: histograms must be nonempty and equal length");
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (p[n] < 0.0 || q[n] < 0.0) throw Error("js_divergence: negative histogram mass");
    sp += p[n];
    sq += q[n];
  }
  if (sp == 0.0 || sq == 0.0) throw Error("js_divergence: empty histogram");

  double div = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double a = p[n] / sp;
    const double b = q[n] / sq;
    const double m = 0.5 * (a + b);
    const double ta = a > 0.0 ? 0.5 * a * std::log2(a / m) : 0.0;
    const double tb = b > 0.0 ? 0.5 * b * std::log2(b / m) : 0.0;
    div += ta + tb;  // one addition per bin keeps the result symmetric in p, q
  }
  return std::clamp(div, 0.0, 1.0);
}

double jsd(const FeatureBatch& real, const FeatureBatch& fake, const JsdOptions& options) {
  check_batches(real, fake);
  if (real.size() == 0 || fake.size() == 0) throw Error("jsd: empty batch");
  if (options.bins < 2) throw Error("jsd: bins must be >= 2");
  const std::size_t groups = std::max<std::size_t>(1, options.groups);
  if (groups > real.dim()) throw Error("jsd: more groups than features");

  double total = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t first = g * real.dim() / groups;
    const std::size_t last = (g + 1) * real.dim() / groups;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto* batch : {&real, &fake}) {
      for (std::size_t n = 0; n < batch->size(); ++n) {
        for (std::size_t c = first; c < last; ++c) {
          lo = std::min(lo, batch->row(n)[c]);
          hi = std::max(hi, batch->row(n)[c]);
        }
      }
    }

    auto histogram = [&](const FeatureBatch& batch) {
      std::vector<double> h(options.bins, 0.0);
      const double span = hi - lo;
      for (std::size_t n = 0; n < batch.size(); ++n) {
        for (std::size_t c = first; c < last; ++c) {
          std::size_t bin = 0;
          if (span > 0.0) {
            bin = static_cast<std::size_t>((batch.row(n)[c] - lo) / span * static_cast<double>(options.bins));
            bin = std::min(bin, options.bins - 1);
          }
          h[bin] += 1.0;
        }
      }
      return h;
    };
    total += std::sqrt(js_divergence(histogram(real), histogram(fake)));
  }
  return std::clamp(total / static_cast<double>(groups), 0.0, 1.0);
}

FidelityMeasure parse_measure(std::string_view name) {
  for (auto m : kAllMeasures) {
    if (name == to_string(m)) return m;
  }
  throw Error("unknown fidelity measure: " + std::string(name));
}

std::string_view to_string(FidelityMeasure measure) {
  switch (measure) {
    case FidelityMeasure::s_rp: return "S-RP";
    case FidelityMeasure::h_rp: return "H-RP";
    case FidelityMeasure::s_dc: return "S-DC";
    case FidelityMeasure::h_dc: return "H-DC";
    case FidelityMeasure::jsd: return "JSD";
  }
  return "JSD";
}

bool lower_is_better(FidelityMeasure measure) { return measure == FidelityMeasure::jsd; }

bool improves(FidelityMeasure measure, double candidate, double incumbent) {
  return lower_is_better(measure) ? candidate < incumbent : candidate > incumbent;
}

double FidelityReport::value(FidelityMeasure measure) const {
  switch (measure) {
    case FidelityMeasure::s_rp: return s_rp;
    case FidelityMeasure::h_rp: return h_rp;
    case FidelityMeasure::s_dc: return s_dc;
    case FidelityMeasure::h_dc: return h_dc;
    case FidelityMeasure::jsd: return jsd;
  }
  return jsd;
}

std::string FidelityReport::csv_header() {
  return "precision,recall,density,coverage,jsd,s_rp,h_rp,s_dc,h_dc";
}

std::string FidelityReport::to_csv() const {
  std::string out;
  for (double v : {precision, recall, density, coverage, jsd, s_rp, h_rp, s_dc, h_dc}) {
    if (!out.empty()) out.push_back(',');
    append_number(out, v);
  }
  return out;
}

FidelityReport FidelityReport::from_csv(std::string_view line) {
  std::array<double, 9> v{};
  std::size_t field = 0;
  std::size_t pos = 0;
  while (field < v.size()) {
    const auto comma = line.find(',', pos);
    const auto token = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v[field]);
    if (ec != std::errc{} || ptr != token.data() + token.size()) throw Error("bad fidelity record: " + std::string(line));
    ++field;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (field != v.size()) throw Error("bad fidelity record: " + std::string(line));
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

FidelityReport combine_fidelity(double precision, double recall, double density, double coverage, double jsd) {
  auto harmonic = [](double a, double b) { return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b); };
  FidelityReport r;
  r.precision = precision;
  r.recall = recall;
  r.density = density;
  r.coverage = coverage;
  r.jsd = jsd;
  r.s_rp = precision + recall;
  r.h_rp = harmonic(precision, recall);
  r.s_dc = density + coverage;
  r.h_dc = harmonic(density, coverage);
  return r;
}

FidelityReport evaluate_fidelity(const FeatureBatch& real, const FeatureBatch& fake, const FidelityOptions& options) {
  const auto pr = generative_pr(real, fake, options.k);
  const auto dc = density_coverage(real, fake, options.k);
  return combine_fidelity(pr.precision, pr.recall, dc.density, dc.coverage, jsd(real, fake, options.jsd));
}

}  // namespace rfanogan::metrics
