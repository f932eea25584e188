#pragma once

#include <filesystem>
#include <iosfwd>

#include "sraug/spectral.hpp"

namespace sraug {

// MELF layout, all little-endian:
//   "MELF" | u32 version=1 | u32 n_frames | u32 n_bins | u32 sample_rate |
//   u32 hop_size | n_frames*n_bins f32, time-major.

inline constexpr std::uint32_t kMelfVersion = 1;

void write_melf(std::ostream& out, const MelSpectrogram& m);
void write_melf(const std::filesystem::path& path, const MelSpectrogram& m);

/// Fields the file does not carry (n_fft, window, fmin, fmax, floor) come from
/// `base`; sample_rate, hop_size and n_mels are taken from the header.
MelSpectrogram read_melf(std::istream& in, const SpectralConfig& base = {});
MelSpectrogram read_melf(const std::filesystem::path& path, const SpectralConfig& base = {});

}  // namespace sraug
