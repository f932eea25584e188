#pragma once

#include <filesystem>

#include "sraug/types.hpp"

namespace sraug {

/// Reads a RIFF/WAVE file holding PCM-16, PCM-24 or float-32 samples in one or
/// two channels. Stereo is averaged to mono; integer samples are divided by
/// 2^(bits-1).
Waveform read_wav(const std::filesystem::path& path);

/// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] and rounded half away
/// from zero.
void write_wav(const std::filesystem::path& path, const Waveform& w);

/// Band-limited resampling with a Kaiser-windowed sinc kernel (beta 12, 64
/// zero crossings per side). Output length is round(len * target / source).
Waveform resample(const Waveform& w, int target_rate);

}  // namespace sraug
