#include <algorithm>
#include <cmath>

#include "rfanogan/error.hpp"
#include "rfanogan/rfdata.hpp"

namespace rfanogan::rfdata {

bool is_known_modulation(std::string_view name) {
  return std::ranges::find(kRadioMlModulations, name) != kRadioMlModulations.end() ||
         std::ranges::find(kSynthClasses, name) != kSynthClasses.end();
}

void require_known_modulation(std::string_view name) {
  if (!is_known_modulation(name)) throw Error("unknown modulation: " + std::string(name));
}

IQFrame::IQFrame(std::size_t width) : IQFrame(width, std::vector<float>(2 * width, 0.0F)) {}

IQFrame::IQFrame(std::size_t width, std::vector<float> samples)
    : width_(width), samples_(std::move(samples)) {
  if (width_ < kMinFrameWidth) {
    throw Error("frame shape not (2, W): width " + std::to_string(width_) + " below minimum " +
                std::to_string(kMinFrameWidth));
  }
  if (samples_.size() != 2 * width_) {
    throw Error("frame shape not (2, W): got " + std::to_string(samples_.size()) +
                " samples for width " + std::to_string(width_));
  }
  if (!std::ranges::all_of(samples_, [](float v) { return std::isfinite(v); })) {
    throw Error("frame contains non-finite samples");
  }
}

NormalizationPolicy parse_normalization(std::string_view name) {
  if (name == "none") return NormalizationPolicy::none;
  if (name == "max-abs") return NormalizationPolicy::max_abs;
  if (name == "unit-power") return NormalizationPolicy::unit_power;
  throw Error("unknown normalization policy: " + std::string(name));
}

std::string_view to_string(NormalizationPolicy policy) {
  switch (policy) {
    case NormalizationPolicy::none: return "none";
    case NormalizationPolicy::max_abs: return "max-abs";
    case NormalizationPolicy::unit_power: return "unit-power";
  }
  return "none";
}

IQFrame normalize_frame(const IQFrame& frame, NormalizationPolicy policy) {
  if (policy == NormalizationPolicy::none) return frame;

  const auto samples = frame.samples();
  double scale = 1.0;
  if (policy == NormalizationPolicy::max_abs) {
    double peak = 0.0;
    for (float v : samples) peak = std::max(peak, static_cast<double>(std::abs(v)));
    if (peak == 0.0) throw Error("degenerate frame: all-zero frame cannot be max-abs normalised");
    scale = 1.0 / peak;
  } else {
    double power = 0.0;
    for (float v : samples) power += static_cast<double>(v) * v;
    power /= static_cast<double>(samples.size());
    if (power == 0.0) throw Error("degenerate frame: all-zero frame cannot be unit-power normalised");
    // A frame already at unit power up to float32 rounding is left untouched so
    // the policy stays idempotent.
    if (std::abs(power - 1.0) <= 1e-6) return frame;
    scale = 1.0 / std::sqrt(power);
  }

  std::vector<float> out(samples.size());
  std::ranges::transform(samples, out.begin(),
                         [scale](float v) { return static_cast<float>(v * scale); });
  return IQFrame(frame.width(), std::move(out));
}

}  // namespace rfanogan::rfdata
