#pragma once

// Batch cost functions of the GAN family. Inputs are discriminator/critic
// outputs for a real batch and a generated batch.

#include <span>

namespace rfanogan::models {

struct CostPair {
  double critic = 0.0;     // J_D, minimised by the discriminator/critic
  double generator = 0.0;  // J_G, minimised by the generator
};

enum class GeneratorVariant { saturating, non_saturating };

inline constexpr double kProbabilityClamp = 1e-12;

// J_D = -(mean log D(x) + mean log(1 - D(G(z)))).
// saturating:     J_G = -mean log(1 - D(G(z)))
// non_saturating: J_G = -mean log D(G(z))
// Probabilities are clamped to [1e-12, 1 - 1e-12] before the logarithm.
CostPair gan_costs(std::span<const double> d_real, std::span<const double> d_fake,
                   GeneratorVariant variant = GeneratorVariant::non_saturating);

// Conditional GAN: the caller conditions the discriminator on labels, the
// arithmetic is the plain GAN one.
CostPair cgan_costs(std::span<const double> d_real_cond, std::span<const double> d_fake_cond,
                    GeneratorVariant variant = GeneratorVariant::non_saturating);

// Least squares with real label a, fake label b and generator target c.
CostPair lsgan_costs(std::span<const double> d_real, std::span<const double> d_fake, double a, double b, double c);

// Wasserstein: critic = mean d_fake - mean d_real, generator = -mean d_fake.
CostPair wgan_costs(std::span<const double> d_real, std::span<const double> d_fake);

}  // namespace rfanogan::models
