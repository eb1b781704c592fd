// Acceptance checks 1-10. Prints one line per criterion:
//   criterion <n>: PASS|FAIL|SKIP  <detail>
// Exit status: 0 when every selected criterion passed, 77 when the only
// non-passing results are skips, 1 otherwise.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfanogan/anomaly.hpp"
#include "rfanogan/costs.hpp"
#include "rfanogan/gradient_penalty.hpp"
#include "rfanogan/harness.hpp"
#include "rfanogan/metrics.hpp"
#include "rfanogan/network.hpp"
#include "rfanogan/rfdata.hpp"
#include "rfanogan/training.hpp"

namespace fs = std::filesystem;
using namespace rfanogan;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

// Collects failed sub-checks; the criterion passes when none failed.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }

  Outcome outcome() const {
    std::ostringstream out;
    out << (total_ - failed_) << "/" << total_ << " checks";
    if (!notes_.empty()) out << "; " << notes_;
    for (const auto& f : failures_) out << "; failed: " << f;
    return {failed_ == 0 ? Status::pass : Status::fail, out.str()};
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rfanogan-acceptance-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// 1 ---------------------------------------------------------------------------

double pair_count_auroc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

Outcome criterion_auroc() {
  Checks c;
  std::mt19937_64 rng(1);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 2 + rng() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    std::uniform_real_distribution<double> u(-5, 5);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = u(rng);
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    // Inject ties by copying scores across positions.
    const std::size_t ties = rng() % (n / 2 + 1);
    for (std::size_t t = 0; t < ties; ++t) s[rng() % n] = s[rng() % n];
    const double err = std::abs(metrics::auroc(s, y).auroc - pair_count_auroc(s, y));
    worst = std::max(worst, err);
    c.expect(err <= 1e-12, "instance " + std::to_string(inst) + " differs by " + fmt(err));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 5.0, "runtime " + fmt(elapsed) + " s >= 5 s");
  c.note("max |diff| " + fmt(worst) + ", " + fmt(elapsed) + " s");
  return c.outcome();
}

// 2 ---------------------------------------------------------------------------

Outcome criterion_losses() {
  Checks c;
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  using V = std::vector<double>;

  const auto gan = models::gan_costs(V{0.9}, V{0.1});
  c.expect(near(gan.critic, -(std::log(0.9) + std::log(0.9)), 1e-6) && near(gan.critic, 0.21072, 1e-5),
           "gan J_D");
  c.expect(near(gan.generator, -std::log(0.1), 1e-6) && near(gan.generator, 2.30259, 1e-5), "gan J_G");
  const double eps = 1e-9;
  c.expect(models::gan_costs(V{1 - eps}, V{eps}).critic < 1e-6, "perfect discriminator J_D -> 0");
  c.expect(near(models::cgan_costs(V{0.9}, V{0.1}).critic, 0.21072, 1e-5), "cgan J_D");

  c.expect(near(models::lsgan_costs(V{1, 1}, V{0, 0}, 1, 0, 1).critic, 0.0, 1e-6), "lsgan labels attained");
  c.expect(near(models::lsgan_costs(V{1}, V{0.5}, 1, 0, 0).generator, 0.25, 1e-6), "lsgan generator 0.25");

  c.expect(near(models::wgan_costs(V{1.5, -2}, V{1.5, -2}).critic, 0.0, 1e-6), "wgan symmetric");
  c.expect(near(models::wgan_costs(V{2, 4}, V{1, 1}).critic, -2.0, 1e-6), "wgan critic -2");
  c.expect(near(models::wgan_costs(V{0}, V{3}).generator, -3.0, 1e-6), "wgan generator -3");

  // Linear critics: the input gradient is w everywhere, so the penalty is
  // lambda * (||w|| - 1)^2 independently of the batch.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t d = 1 + static_cast<std::int64_t>(rng() % 16);
    std::vector<double> wv(static_cast<std::size_t>(d));
    double norm = 0.0;
    for (auto& v : wv) {
      v = nd(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const auto unit = torch::tensor(wv, torch::kFloat64) / norm;
    const double scale = 0.25 + 3.0 * static_cast<double>(rng() % 100) / 100.0;
    const auto real = torch::randn({5, d}, torch::kFloat64);
    const auto fake = torch::randn({5, d}, torch::kFloat64);
    const double lambda = 10.0;
    auto critic = [](torch::Tensor w) {
      return models::DifferentiableMap([w](const torch::Tensor& x) { return (x * w).sum(1); });
    };
    const double unit_gp = models::gradient_penalty(critic(unit), real, fake, lambda, 7);
    c.expect(std::abs(unit_gp) <= 1e-6, "unit critic penalty " + fmt(unit_gp));
    const double gp = models::gradient_penalty(critic(unit * scale), real, fake, lambda, 7);
    const double expected = lambda * (scale - 1) * (scale - 1);
    c.expect(std::abs(gp - expected) <= 1e-5, "scaled critic penalty " + fmt(gp) + " vs " + fmt(expected));
  }
  const auto two_sum = models::DifferentiableMap([](const torch::Tensor& x) { return 2 * x.sum(1); });
  const double gp90 = models::gradient_penalty(two_sum, torch::randn({3, 4}), torch::randn({3, 4}), 10.0, 1);
  c.expect(std::abs(gp90 - 90.0) <= 1e-5, "2*sum critic penalty " + fmt(gp90));
  return c.outcome();
}

// 3 ---------------------------------------------------------------------------

Outcome criterion_shapes() {
  Checks c;
  using models::Role;
  const std::int64_t W = 128;
  for (auto role : {Role::generator, Role::critic, Role::encoder, Role::cae}) {
    const auto spec = models::build_network(role, W);
    std::vector<std::int64_t> in{4};
    in.insert(in.end(), spec.input_shape().begin(), spec.input_shape().end());
    try {
      const auto shapes = models::infer_shapes(spec, in);
      c.expect(shapes.size() == spec.layers.size(), std::string(models::to_string(role)) + " layer count");
    } catch (const std::exception& e) {
      c.expect(false, std::string(models::to_string(role)) + ": " + e.what());
    }
  }
  const auto critic = models::build_network(Role::critic, W);
  bool flatten_found = false;
  for (const auto& l : critic.layers) {
    if (l.kind == models::LayerKind::reshape && l.in_shape == models::Shape{1024, 2, 4} &&
        l.out_shape == models::Shape{8192}) {
      flatten_found = true;
    }
  }
  c.expect(flatten_found, "critic flatten (N,1024,2,4) -> (N,8192)");
  c.expect(critic.output_shape() == models::Shape{1}, "critic output (N,1)");
  c.expect(critic.feature_width() == 8192, "critic feature width 8192");

  const auto cae = models::build_network(Role::cae, W);
  bool bottleneck_found = false;
  for (std::size_t i = 0; i + 1 < cae.layers.size(); ++i) {
    const auto& l = cae.layers[i];
    if (l.kind == models::LayerKind::reshape && l.in_shape == models::Shape{1024, 2, 2} &&
        cae.layers[i + 1].kind == models::LayerKind::linear && cae.layers[i + 1].out_shape == models::Shape{100}) {
      bottleneck_found = true;
    }
  }
  c.expect(bottleneck_found, "CAE bottleneck from (1024,2,2)");
  c.expect(cae.output_shape() == models::Shape{1, 2, W}, "CAE output (N,1,2,128)");
  c.expect(models::build_network(Role::generator, W).output_shape() == models::Shape{1, 2, W}, "generator output");
  c.expect(models::build_network(Role::encoder, W).output_shape() == models::Shape{100}, "encoder output 100");
  return c.outcome();
}

// 4 ---------------------------------------------------------------------------

models::Network scalar_linear(double weight, bool features) {
  models::SpecBuilder b({1});
  b.linear(1);
  if (features) b.mark_features();
  models::Network net(b.build(models::Role::custom, 1, 0));
  torch::NoGradGuard no_grad;
  for (auto& p : net->named_parameters()) {
    if (p.key().ends_with("weight")) p.value().fill_(weight);
    if (p.key().ends_with("bias")) p.value().zero_();
  }
  return net;
}

Outcome criterion_scores() {
  Checks c;
  std::mt19937_64 rng(4);
  std::normal_distribution<float> nd;

  const std::int64_t W = 32, flat = 2 * W;
  models::Network E(models::SpecBuilder({1, 2, W}).reshape({flat}).build(models::Role::custom, flat, W));
  models::Network G(models::SpecBuilder({flat}).reshape({1, 2, W}).build(models::Role::custom, flat, W));
  models::Network D(
      models::SpecBuilder({1, 2, W}).reshape({flat}).mark_features().build(models::Role::custom, flat, W));
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> s(static_cast<std::size_t>(flat));
    for (auto& v : s) v = nd(rng);
    worst = std::max(worst, std::abs(anomaly::fanogan_score(rfdata::IQFrame(W, s), G, E, D).raw));
  }
  c.expect(worst <= 1e-9, "perfect reconstruction score " + fmt(worst));

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> raw(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = static_cast<double>(rng() % 1000) / 7.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    const auto norm = anomaly::normalize_scores(raw);
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    if (*lo == *hi) continue;
    c.expect(norm.values[static_cast<std::size_t>(lo - raw.begin())] == 0.0, "min maps to 0");
    c.expect(norm.values[static_cast<std::size_t>(hi - raw.begin())] == 1.0, "max maps to 1");
    c.expect(metrics::auroc(norm.values, y).auroc == metrics::auroc(raw, y).auroc, "AUROC preserved exactly");
  }

  auto g1 = scalar_linear(1.0, false);
  auto d1 = scalar_linear(1.5, true);
  for (float target : {0.3f, -0.7f, 2.0f}) {
    anomaly::AnoganOptions opts;
    opts.lambda = 1e-9;
    opts.steps = 20;
    const auto x = torch::tensor({target}).reshape({1, 1});
    const auto r = anomaly::anogan_search(x, g1, d1, opts);
    const double residual = (x - g1->forward(r.z)).abs().sum().item<double>();
    c.expect(std::abs(r.score.raw - residual) <= 1e-6,
             "anogan lambda->0 " + fmt(r.score.raw) + " vs residual " + fmt(residual));
  }
  return c.outcome();
}

// 5 ---------------------------------------------------------------------------

struct BruteKnn {
  // Squared distances on integer coordinates are exact in double.
  static double d2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
  }
  static std::vector<double> radii(const metrics::FeatureBatch& set, std::size_t k) {
    std::vector<double> r(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      std::vector<double> d;
      for (std::size_t j = 0; j < set.size(); ++j) {
        if (j != i) d.push_back(d2(set.row(i), set.row(j)));
      }
      std::sort(d.begin(), d.end());
      r[i] = d[k - 1];
    }
    return r;
  }
  // Fraction of `probe` inside the union of `centres` balls.
  static double inside_fraction(const metrics::FeatureBatch& centres, const metrics::FeatureBatch& probe,
                                std::size_t k) {
    const auto r = radii(centres, k);
    double hit = 0.0;
    for (std::size_t j = 0; j < probe.size(); ++j) {
      for (std::size_t i = 0; i < centres.size(); ++i) {
        if (d2(probe.row(j), centres.row(i)) <= r[i]) {
          hit += 1.0;
          break;
        }
      }
    }
    return hit / static_cast<double>(probe.size());
  }
  static metrics::DensityCoverage dc(const metrics::FeatureBatch& real, const metrics::FeatureBatch& fake,
                                     std::size_t k) {
    const auto r = radii(real, k);
    double count = 0.0, covered = 0.0;
    for (std::size_t i = 0; i < real.size(); ++i) {
      bool any = false;
      for (std::size_t j = 0; j < fake.size(); ++j) {
        if (d2(fake.row(j), real.row(i)) <= r[i]) {
          count += 1.0;
          any = true;
        }
      }
      covered += any ? 1.0 : 0.0;
    }
    return {count / (static_cast<double>(k) * static_cast<double>(fake.size())),
            covered / static_cast<double>(real.size())};
  }
};

metrics::FeatureBatch random_batch(std::mt19937_64& rng, std::size_t n, std::size_t dim, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<double> v(n * dim);
  for (auto& e : v) e = u(rng);
  return metrics::FeatureBatch(dim, std::move(v));
}

Outcome criterion_fidelity() {
  Checks c;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<double> values(300 * 16);
  for (auto& v : values) v = nd(rng);
  const metrics::FeatureBatch real(16, values);
  const auto same = metrics::evaluate_fidelity(real, real);
  c.expect(same.precision == 1.0 && same.recall == 1.0 && same.coverage == 1.0, "identical sets P=R=C=1");
  c.expect(same.jsd <= 0.05, "identical sets jsd " + fmt(same.jsd));
  for (auto& v : values) v += 1000.0;
  const metrics::FeatureBatch far(16, values);
  const auto apart = metrics::evaluate_fidelity(real, far);
  c.expect(apart.precision == 0.0 && apart.recall == 0.0 && apart.coverage == 0.0, "separated sets P=R=C=0");
  c.expect(apart.jsd >= 0.95, "separated sets jsd " + fmt(apart.jsd));
  c.note("identical jsd " + fmt(same.jsd) + ", separated jsd " + fmt(apart.jsd));

  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dim = 1 + rng() % 4;
    const std::size_t k = 1 + rng() % 4;
    const std::size_t n_real = k + 1 + rng() % (20 - k);
    const std::size_t n_fake = k + 1 + rng() % (20 - k);
    const auto a = random_batch(rng, n_real, dim, -4, 4);
    const auto b = random_batch(rng, n_fake, dim, -4, 4);
    const auto pr = metrics::generative_pr(a, b, k);
    const auto dc = metrics::density_coverage(a, b, k);
    const auto want_dc = BruteKnn::dc(a, b, k);
    c.expect(std::abs(pr.precision - BruteKnn::inside_fraction(a, b, k)) <= 1e-12, "precision vs oracle");
    c.expect(std::abs(pr.recall - BruteKnn::inside_fraction(b, a, k)) <= 1e-12, "recall vs oracle");
    c.expect(std::abs(dc.density - want_dc.density) <= 1e-12, "density vs oracle");
    c.expect(std::abs(dc.coverage - want_dc.coverage) <= 1e-12, "coverage vs oracle");
  }
  return c.outcome();
}

// 6 ---------------------------------------------------------------------------

constexpr double kSmokeBudgetSeconds = 600.0;

Outcome criterion_smoke(bool verbose) {
  const auto dir = fresh_dir("smoke");
  std::ostringstream attempts;
  Outcome result{Status::fail, ""};
  for (std::uint64_t attempt = 0; attempt < 3; ++attempt) {
    const std::uint64_t seed = attempt;
    const auto t0 = Clock::now();
    rfdata::SynthSpec spec;
    spec.classes = {"tone", "wideband-noise"};
    spec.frames_per_class = 1000;
    spec.width = 128;
    const auto path = dir / ("smoke-" + std::to_string(seed) + ".rfds");
    rfdata::write_container(rfdata::synth_dataset(spec, seed), path);

    harness::ExperimentOptions opts;
    opts.cfg.epochs = 30;
    opts.cfg.seed = seed;
    opts.split.seed = seed;
    opts.dataset = path;
    opts.modulations = {"tone"};
    opts.run_cae = false;
    opts.run_id = "smoke-" + std::to_string(seed);
    opts.runs_root = dir / "runs";
    if (verbose) opts.log = [t0](std::string_view s) { std::cerr << "[" << fmt(seconds_since(t0)) << " s] " << s << '\n'; };
    const auto record = harness::run_experiment(opts);
    const double elapsed = seconds_since(t0);

    const auto& r = record.per_modulation.at(0);
    const double auc = r.failed ? 0.0 : r.auroc_fanogan.at(opts.cfg.selection_measure);
    attempts << (attempt ? "; " : "") << "seed " << seed << ": AUROC " << fmt(auc) << ", " << fmt(elapsed) << " s";
    if (r.failed) attempts << " (failed at " << r.failed_stage << ": " << r.error << ")";
    const bool auc_ok = auc >= 0.95;
    const bool time_ok = elapsed <= kSmokeBudgetSeconds;
    if (auc_ok && time_ok) {
      result.status = Status::pass;
      break;
    }
    // A reseed cannot shorten the run; only an AUROC miss is worth retrying.
    if (!time_ok) {
      attempts << " (exceeds the " << fmt(kSmokeBudgetSeconds) << " s budget)";
      break;
    }
  }
  result.detail = attempts.str() + "; hardware: " + harness::hardware_description();
  fs::remove_all(dir);
  return result;
}

// 7 ---------------------------------------------------------------------------

Outcome criterion_public(bool verbose) {
  const char* env = std::getenv("RFANOGAN_RADIOML");
  if (env == nullptr || !fs::exists(env)) {
    return {Status::skip, "public dataset not available (set RFANOGAN_RADIOML to the RML2016.10a pickle)"};
  }
  const char* fmt_env = std::getenv("RFANOGAN_RADIOML_FORMAT");
  const auto dir = fresh_dir("public");
  harness::ExperimentOptions opts;
  opts.cfg.epochs = 100;
  opts.cfg.selection_measure = metrics::FidelityMeasure::jsd;
  opts.dataset = env;
  opts.format = fmt_env ? rfdata::parse_dataset_format(fmt_env) : rfdata::DatasetFormat::public_serialized_map;
  opts.modulations = {"GFSK", "CPFSK", "AM-DSB"};
  opts.run_cae = true;
  opts.run_id = "public";
  opts.runs_root = dir;
  if (verbose) opts.log = [](std::string_view s) { std::cerr << s << '\n'; };
  const auto record = harness::run_experiment(opts);
  Checks c;
  for (const auto& r : record.per_modulation) {
    if (r.failed) {
      c.expect(false, r.modulation + " failed at " + r.failed_stage + ": " + r.error);
      continue;
    }
    const double f = r.auroc_fanogan.at(metrics::FidelityMeasure::jsd);
    const double cae = r.auroc_cae.value_or(1.0);
    c.note(r.modulation + " f-AnoGAN " + fmt(f) + " CAE " + fmt(cae));
    c.expect(f >= 0.85, r.modulation + " AUROC " + fmt(f) + " < 0.85");
    c.expect(f > cae, r.modulation + " AUROC does not exceed CAE");
  }
  c.note("report in " + record.run_dir.string());
  return c.outcome();
}

// 8 ---------------------------------------------------------------------------

Outcome criterion_classification() {
  Checks c;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    // Small counts so zero rows and columns show up.
    const std::uint64_t scale = trial % 4 == 0 ? 3 : 1000;
    std::uint64_t tp = rng() % scale, fp = rng() % scale, tn = rng() % scale, fn = rng() % scale;
    if (tp + fp + tn + fn == 0) tn = 1;
    const auto m = metrics::classification_metrics(tp, fp, tn, fn);
    // Expand the matrix into labelled predictions and count directly.
    std::vector<std::pair<int, int>> pairs;  // (truth, prediction)
    pairs.insert(pairs.end(), tp, {1, 1});
    pairs.insert(pairs.end(), fp, {0, 1});
    pairs.insert(pairs.end(), tn, {0, 0});
    pairs.insert(pairs.end(), fn, {1, 0});
    double correct = 0;
    for (auto [t, p] : pairs) correct += t == p ? 1 : 0;
    c.expect(std::abs(m.accuracy - correct / static_cast<double>(pairs.size())) <= 1e-12, "accuracy by counting");
    const double pr_sum = m.precision + m.recall;
    const double f1 = pr_sum == 0.0 ? 0.0 : 2 * m.precision * m.recall / pr_sum;
    c.expect(std::abs(m.f1 - f1) <= 1e-12, "f1 = 2PR/(P+R)");
    const double dice = 2 * tp + fp + fn == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    c.expect(std::abs(m.f1 - dice) <= 1e-12, "f1 = 2TP/(2TP+FP+FN)");
  }
  return c.outcome();
}

// 9 ---------------------------------------------------------------------------

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion_determinism() {
  Checks c;
  const auto dir = fresh_dir("determinism");
  rfdata::SynthSpec spec;
  spec.classes = {"tone", "wideband-noise"};
  spec.frames_per_class = 40;
  spec.width = 64;
  const auto path = dir / "synth.rfds";
  rfdata::write_container(rfdata::synth_dataset(spec, 9), path);

  harness::ExperimentOptions opts;
  opts.cfg.epochs = 3;
  opts.cfg.batch_size = 8;
  opts.cfg.eval_every = 1;
  opts.cfg.seed = 9;
  opts.dataset = path;
  opts.measures = {metrics::FidelityMeasure::jsd, metrics::FidelityMeasure::h_rp};
  opts.runs_root = dir / "runs";
  opts.run_id = "a";
  const auto a = harness::run_experiment(opts);
  opts.run_id = "b";
  const auto b = harness::run_experiment(opts);

  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.run_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".bin") continue;
    const auto rel = fs::relative(entry.path(), a.run_dir);
    ++compared;
    c.expect(file_bytes(entry.path()) == file_bytes(b.run_dir / rel), rel.string() + " differs");
  }
  c.expect(compared > 0, "no parameter blobs found");
  const auto ta = file_bytes(a.run_dir / "auroc_table.csv");
  c.expect(!ta.empty() && ta == file_bytes(b.run_dir / "auroc_table.csv"), "AUROC tables differ");
  c.note(std::to_string(compared) + " blobs compared");
  fs::remove_all(dir);
  return c.outcome();
}

// 10 --------------------------------------------------------------------------

Outcome criterion_benchmark() {
  Checks c;
  torch::manual_seed(10);
  auto G = models::make_network(models::Role::generator, 128);
  auto E = models::make_network(models::Role::encoder, 128);
  auto D = models::make_network(models::Role::critic, 128);
  const auto frames = torch::randn({8, 1, 2, 128});
  const auto t = harness::benchmark_inference(G, E, D, frames, 60, 10);
  c.expect(std::isfinite(t.mean_latency_s) && t.mean_latency_s > 0.0, "latency finite and positive");
  c.expect(std::abs(t.throughput * t.mean_latency_s - 1.0) <= 1e-12, "throughput = 1/latency");
  c.expect(t.n_timed == 50, "timed sample count");
  c.note("latency " + fmt(t.mean_latency_s) + " s, " + fmt(t.throughput) +
         " samples/s (reference: 0.005784 s, 172.9 samples/s on other hardware)");
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> selected;
  bool verbose = false;
  app.add_option("--criterion,-c", selected, "criteria to run (default: all)")->check(CLI::Range(1, 10));
  app.add_flag("--verbose,-v", verbose, "progress output for the long-running criteria");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int n = 1; n <= 10; ++n) selected.push_back(n);
  }

  training::use_deterministic_execution();
  const std::function<Outcome()> criteria[] = {
      criterion_auroc,
      criterion_losses,
      criterion_shapes,
      criterion_scores,
      criterion_fidelity,
      [verbose] { return criterion_smoke(verbose); },
      [verbose] { return criterion_public(verbose); },
      criterion_classification,
      criterion_determinism,
      criterion_benchmark,
  };

  bool failed = false, skipped = false;
  for (int n : selected) {
    Outcome o;
    try {
      o = criteria[n - 1]();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
    std::cout << "criterion " << n << ": " << tag << "  " << o.detail << std::endl;
    failed |= o.status == Status::fail;
    skipped |= o.status == Status::skip;
  }
  if (failed) return 1;
  return skipped ? 77 : 0;
}
