#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "rfanogan/error.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::rfdata {
namespace {

using cplx = std::complex<double>;
constexpr std::size_t kSamplesPerSymbol = 8;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Unit average power baseband waveform of the named class.
std::vector<cplx> waveform(std::string_view cls, std::size_t width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution bit(0.5);
  std::vector<cplx> s(width);
  const double phase = kTwoPi * unit(rng);

  if (cls == "tone") {
    const double freq = 0.01 + 0.09 * unit(rng);
    for (std::size_t n = 0; n < width; ++n) s[n] = std::polar(1.0, kTwoPi * freq * static_cast<double>(n) + phase);
  } else if (cls == "bpsk" || cls == "qpsk") {
    const bool quad = cls == "qpsk";
    cplx symbol;
    for (std::size_t n = 0; n < width; ++n) {
      if (n % kSamplesPerSymbol == 0) {
        const double angle = quad ? std::numbers::pi / 4 + (std::numbers::pi / 2) * static_cast<double>(rng() % 4)
                                  : (bit(rng) ? 0.0 : std::numbers::pi);
        symbol = std::polar(1.0, angle + phase);
      }
      s[n] = symbol;
    }
  } else if (cls == "fsk") {
    constexpr double kDeviation = 0.0625;
    double acc = phase;
    double freq = 0.0;
    for (std::size_t n = 0; n < width; ++n) {
      if (n % kSamplesPerSymbol == 0) freq = bit(rng) ? kDeviation : -kDeviation;
      s[n] = std::polar(1.0, acc);
      acc += kTwoPi * freq;
    }
  } else if (cls == "wideband-noise") {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (auto& v : s) v = {normal(rng), normal(rng)};
  } else {
    throw Error("unknown synthetic class: " + std::string(cls));
  }
  return s;
}

}  // namespace

RFDataset synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.width < kMinFrameWidth) {
    throw Error("frame shape not (2, W): synthetic width " + std::to_string(spec.width) + " below " +
                std::to_string(kMinFrameWidth));
  }
  for (const auto& cls : spec.classes) {
    if (std::ranges::find(kSynthClasses, cls) == kSynthClasses.end()) {
      throw Error("unknown synthetic class: " + cls);
    }
  }

  const bool noiseless = std::isinf(spec.snr_db) && spec.snr_db > 0;
  const double noise_sigma = noiseless ? 0.0 : std::sqrt(std::pow(10.0, -spec.snr_db / 10.0) / 2.0);
  const int snr_label = noiseless ? kNoiselessSnrDb : static_cast<int>(std::lround(spec.snr_db));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SampleRecord> records;
  records.reserve(spec.classes.size() * spec.frames_per_class);
  for (const auto& cls : spec.classes) {
    for (std::size_t k = 0; k < spec.frames_per_class; ++k) {
      const auto s = waveform(cls, spec.width, rng);
      std::vector<float> samples(2 * spec.width);
      for (std::size_t n = 0; n < spec.width; ++n) {
        double re = s[n].real();
        double im = s[n].imag();
        if (!noiseless) {
          re += noise_sigma * noise(rng);
          im += noise_sigma * noise(rng);
        }
        samples[n] = static_cast<float>(re);
        samples[spec.width + n] = static_cast<float>(im);
      }
      records.push_back({IQFrame(spec.width, std::move(samples)), cls, snr_label});
    }
  }

  std::string provenance = "synth:seed=" + std::to_string(seed) + ";snr=" + std::to_string(spec.snr_db) +
                           ";width=" + std::to_string(spec.width) + ";frames_per_class=" +
                           std::to_string(spec.frames_per_class) + ";classes=";
  for (std::size_t k = 0; k < spec.classes.size(); ++k) provenance += (k ? "," : "") + spec.classes[k];
  return RFDataset(std::move(records), spec.width, std::move(provenance));
}

}  // namespace rfanogan::rfdata
