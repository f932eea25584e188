#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "sraug/spectral.hpp"

namespace sraug {

enum class PhaseInit { Zero, Random };

struct GriffinLimConfig {
  int n_iters = 60;
  PhaseInit init = PhaseInit::Zero;
  double momentum = 0.99;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr double kPeakLimit = 0.95;

/// Fast Griffin-Lim: alternating istft/stft projections with momentum on the
/// rebuilt spectrum. The result is peak-normalized to 0.95 when it would
/// exceed that.
Waveform griffin_lim(const LinearSpectrogram& s, const GriffinLimConfig& cfg = {});

/// ||stft(w)| - s|_F / |s|_F. Zero when both are zero.
double spectral_convergence(const Waveform& w, const LinearSpectrogram& s);

/// exp -> NNLS mel inversion -> Griffin-Lim. Output length (T - 1) * hop.
Waveform reconstruct_from_mel(const MelSpectrogram& m, const GriffinLimConfig& cfg = {});

struct ExternalVocoderOptions {
  std::chrono::seconds timeout{120};
};

/// Hands `m` to an external program. `command_template` is run through
/// /bin/sh after replacing {mel} with a MELF input path and {wav} with the path
/// the program must write a RIFF/WAVE file to. The result is resampled to
/// m.config.sample_rate when needed.
Waveform external_vocoder(const MelSpectrogram& m, const std::string& command_template,
                          const ExternalVocoderOptions& options = {});

}  // namespace sraug
