#pragma once

#include <filesystem>
#include <iosfwd>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "sraug/error.hpp"
#include "sraug/types.hpp"

namespace sraug {

struct PitchConfig {
  double f0_min = 50.0;
  double f0_max = 600.0;
  int frame_size = 1280;
  int hop_size = 320;
  double yin_threshold = 0.15;

  void validate(int sample_rate) const;
};

/// One value per frame; 0.0 marks an unvoiced frame.
struct F0Track {
  std::vector<double> f0;
  int hop_size = 320;
  int frame_size = 1280;
  int sample_rate = 16000;

  std::vector<double> voiced() const;
  /// Centre of frame `i` in seconds.
  double frame_time(std::size_t i) const noexcept {
    return (static_cast<double>(i) * hop_size + 0.5 * frame_size) / sample_rate;
  }
};

/// YIN over frames of frame_size samples every hop_size samples:
/// cumulative-mean-normalized difference, first dip under the threshold
/// followed down to its local minimum, parabolic refinement.
F0Track yin_f0(const Waveform& w, const PitchConfig& cfg = {});

/// Median of the voiced frames; 0 when none are voiced.
double median_f0(const F0Track& track);

/// Relative spread below which a sequence counts as constant; rounding noise
/// alone must not yield a correlation.
inline constexpr double kConstantRelTol = 1e-10;

/// Pearson correlation. Throws DegenerateVariance when either input is
/// constant (standard deviation at most kConstantRelTol times its largest
/// magnitude) and DimensionMismatch on unequal or too-short input.
template <typename DerivedX, typename DerivedY>
double pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "pearson needs two sequences of equal length >= 2");
  }
  const auto xa = x.reshaped().array().template cast<double>();
  const auto ya = y.reshaped().array().template cast<double>();
  const Eigen::ArrayXd dx = xa - xa.mean();
  const Eigen::ArrayXd dy = ya - ya.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  const double n = static_cast<double>(x.size());
  const double tx = kConstantRelTol * xa.abs().maxCoeff();
  const double ty = kConstantRelTol * ya.abs().maxCoeff();
  if (!(sxx > n * tx * tx) || !(syy > n * ty * ty)) {
    throw Error(ErrorCode::DegenerateVariance, "pearson of a constant sequence is undefined");
  }
  const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kMinCoVoicedFrames = 10;

/// Correlation of the F0 contours over frames voiced in both signals, after
/// truncating to the shorter track. `converted` is resampled to the source
/// rate first when the rates differ.
double f0_pcc(const Waveform& source, const Waveform& converted, const PitchConfig& cfg = {});

/// CSV with header "frame,time_sec,f0_hz" and 6-decimal fixed values.
void write_f0_csv(std::ostream& out, const F0Track& track);
void write_f0_csv(const std::filesystem::path& path, const F0Track& track);

}  // namespace sraug
