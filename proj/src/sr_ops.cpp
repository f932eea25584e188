#include "sraug/sr_ops.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sraug {

double standard_normal(Rng& rng) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

const char* to_string(Axis axis) noexcept {
  return axis == Axis::Vertical ? "vertical" : "horizontal";
}

Axis parse_axis(std::string_view name) {
  if (name == "vertical") return Axis::Vertical;
  if (name == "horizontal") return Axis::Horizontal;
  throw Error(ErrorCode::InvalidArgument, "axis must be vertical or horizontal, got '" + std::string(name) + "'");
}

void ResizeSpec::validate() const {
  if (!(ratio >= kMinRatio && ratio <= kMaxRatio)) {
    throw Error(ErrorCode::InvalidArgument, "resize ratio " + std::to_string(ratio) + " outside [0.5, 2.0]");
  }
  if (!std::isfinite(pad_noise_std) || pad_noise_std < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "pad_noise_std must be finite and >= 0");
  }
}

void RatioRange::validate() const {
  if (!(kMinRatio <= lo && lo <= hi && hi <= kMaxRatio)) {
    throw Error(ErrorCode::InvalidArgument, "ratio range must satisfy 0.5 <= lo <= hi <= 2.0");
  }
}

MelSpectrogram vertical_sr(const MelSpectrogram& m, const ResizeSpec& spec, Rng& rng) {
  spec.validate();
  const Index bins = m.n_bins();
  const Index resized_bins = std::max<Index>(1, round_half_up(static_cast<double>(bins) * spec.ratio));
  if (resized_bins == bins) return m;

  RealMatrix resized = resize_axis(m.logmels, resized_bins, Axis::Vertical);
  if (resized_bins > bins) {
    return {resized.leftCols(bins), m.config};
  }

  const double floor_value = std::log(m.config.log_floor);
  RealMatrix out(m.n_frames(), bins);
  out.leftCols(resized_bins) = resized;
  for (Index t = 0; t < out.rows(); ++t) {
    const double top = resized(t, resized_bins - 1);
    for (Index b = resized_bins; b < bins; ++b) {
      // Clamped so padded cells respect the log floor like every other entry.
      out(t, b) = std::max(floor_value, top + spec.pad_noise_std * standard_normal(rng));
    }
  }
  return {std::move(out), m.config};
}

MelSpectrogram horizontal_sr(const MelSpectrogram& m, const ResizeSpec& spec) {
  spec.validate();
  if (m.n_frames() < 2) throw Error(ErrorCode::InputTooShort, "horizontal resize needs at least 2 frames");
  const Index frames = std::max<Index>(1, round_half_up(static_cast<double>(m.n_frames()) * spec.ratio));
  return {resize_axis(m.logmels, frames, Axis::Horizontal), m.config};
}

MelSpectrogram apply_sr(const MelSpectrogram& m, const ResizeSpec& spec) {
  if (spec.axis == Axis::Horizontal) return horizontal_sr(m, spec);
  Rng rng(spec.seed);
  return vertical_sr(m, spec, rng);
}

double sample_ratio(const RatioRange& range, Rng& rng) {
  range.validate();
  return range.lo + (range.hi - range.lo) * uniform01(rng);
}

}  // namespace sraug
