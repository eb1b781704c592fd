#include "rfanogan/costs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfanogan/error.hpp"

namespace rfanogan::models {
namespace {

void require_batches(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("cost functions need nonempty batches");
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double clamp_probability(double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

double mean_log(std::span<const double> v, bool complement) {
  double s = 0.0;
  for (double p : v) {
    const double q = clamp_probability(p);
    s += std::log(complement ? 1.0 - q : q);
  }
  return s / static_cast<double>(v.size());
}

double mean_squared_offset(std::span<const double> v, double target) {
  double s = 0.0;
  for (double x : v) s += (x - target) * (x - target);
  return s / static_cast<double>(v.size());
}

}  // namespace

CostPair gan_costs(std::span<const double> d_real, std::span<const double> d_fake, GeneratorVariant variant) {
  require_batches(d_real, d_fake);
  CostPair c;
  c.critic = -(mean_log(d_real, false) + mean_log(d_fake, true));
  c.generator = variant == GeneratorVariant::saturating ? -mean_log(d_fake, true) : -mean_log(d_fake, false);
  return c;
}

CostPair cgan_costs(std::span<const double> d_real_cond, std::span<const double> d_fake_cond,
                    GeneratorVariant variant) {
  return gan_costs(d_real_cond, d_fake_cond, variant);
}

CostPair lsgan_costs(std::span<const double> d_real, std::span<const double> d_fake, double a, double b, double c) {
  require_batches(d_real, d_fake);
  return {mean_squared_offset(d_real, a) + mean_squared_offset(d_fake, b), mean_squared_offset(d_fake, c)};
}

CostPair wgan_costs(std::span<const double> d_real, std::span<const double> d_fake) {
  require_batches(d_real, d_fake);
  return {mean(d_fake) - mean(d_real), -mean(d_fake)};
}

}  // namespace rfanogan::models
