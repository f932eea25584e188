#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>

#include <Eigen/Core>

namespace sraug {

using Index = Eigen::Index;

/// Time-major dense matrix: one row per frame. Rows are contiguous so a frame
/// can be handed to the FFT without copying.
template <typename Scalar>
using FrameMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealMatrix = FrameMatrix<double>;
using ComplexMatrix = FrameMatrix<std::complex<double>>;
using RealVector = Eigen::VectorXd;

/// Mono audio. Samples are nominally in [-1, 1].
class Waveform {
 public:
  Waveform() = default;
  Waveform(RealVector samples, int sample_rate);
  Waveform(std::span<const double> samples, int sample_rate);

  const RealVector& samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  Index size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.size() == 0; }
  double duration_sec() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

 private:
  RealVector samples_;
  int sample_rate_ = 16000;
};

}  // namespace sraug
