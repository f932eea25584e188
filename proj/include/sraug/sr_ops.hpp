#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <string_view>

#include "sraug/error.hpp"
#include "sraug/random.hpp"
#include "sraug/spectral.hpp"

namespace sraug {

/// Time runs down the rows, frequency bins across the columns.
enum class Axis { Vertical, Horizontal };

const char* to_string(Axis axis) noexcept;
Axis parse_axis(std::string_view name);

struct ResizeSpec {
  double ratio = 1.0;
  Axis axis = Axis::Vertical;
  double pad_noise_std = 0.1;  // log-mel units
  std::uint64_t seed = 0;

  void validate() const;
};

struct RatioRange {
  double lo = 0.85;
  double hi = 1.15;

  void validate() const;
};

inline constexpr double kMinRatio = 0.5;
inline constexpr double kMaxRatio = 2.0;

/// floor(x + 0.5), the tie rule used for every resized length.
inline Index round_half_up(double x) { return static_cast<Index>(std::floor(x + 0.5)); }

/// Linear interpolation of every line along one axis to `new_len` samples.
/// Align-corners mapping: output j reads input position j*(L-1)/(L'-1), so an
/// unchanged length reproduces the input exactly.
template <typename Derived>
FrameMatrix<typename Derived::Scalar> resize_axis(const Eigen::MatrixBase<Derived>& mat,
                                                  Index new_len, Axis axis) {
  using Scalar = typename Derived::Scalar;
  if (new_len < 1 || mat.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "resize_axis needs a non-empty matrix and new_len >= 1");
  }
  const bool along_cols = axis == Axis::Vertical;
  const Index len = along_cols ? mat.cols() : mat.rows();
  if (new_len == len) return mat;

  FrameMatrix<Scalar> out(along_cols ? mat.rows() : new_len, along_cols ? new_len : mat.cols());
  for (Index j = 0; j < new_len; ++j) {
    const double pos =
        new_len == 1 ? 0.0 : static_cast<double>(j) * static_cast<double>(len - 1) / static_cast<double>(new_len - 1);
    Index i0 = static_cast<Index>(std::floor(pos));
    if (i0 >= len - 1) i0 = len - 1;
    const Index i1 = std::min(i0 + 1, len - 1);
    const Scalar frac = static_cast<Scalar>(pos - static_cast<double>(i0));
    if (along_cols) {
      out.col(j) = (Scalar(1) - frac) * mat.col(i0) + frac * mat.col(i1);
    } else {
      out.row(j) = (Scalar(1) - frac) * mat.row(i0) + frac * mat.row(i1);
    }
  }
  return out;
}

/// Frequency-axis resize back-filled to the original bin count. r < 1 squeezes
/// the spectrogram and pads the top rows with the top resized bin of each frame
/// plus per-cell Gaussian noise; r > 1 stretches it and cuts the excess top
/// rows. The frame count never changes.
MelSpectrogram vertical_sr(const MelSpectrogram& m, const ResizeSpec& spec, Rng& rng);

/// Time-axis resize to round(T * r) frames. No pad or cut.
MelSpectrogram horizontal_sr(const MelSpectrogram& m, const ResizeSpec& spec);

/// Dispatches on spec.axis. The vertical branch seeds its own generator from
/// spec.seed.
MelSpectrogram apply_sr(const MelSpectrogram& m, const ResizeSpec& spec);

double sample_ratio(const RatioRange& range, Rng& rng);

}  // namespace sraug
