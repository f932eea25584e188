#pragma once

#include <memory>

#include <Eigen/SparseCore>

#include "sraug/types.hpp"

namespace sraug {

struct SpectralConfig {
  int n_fft = 1280;
  int win_size = 1280;
  int hop_size = 320;
  int n_mels = 80;
  int sample_rate = 16000;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;

  int n_bins() const noexcept { return n_fft / 2 + 1; }
  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  friend bool operator==(const SpectralConfig&, const SpectralConfig&) = default;
};

struct ComplexSpectrogram {
  ComplexMatrix frames;  // [n_frames x n_bins]
  SpectralConfig config;
};

struct LinearSpectrogram {
  RealMatrix mags;  // [n_frames x n_bins], non-negative
  SpectralConfig config;
};

struct MelSpectrogram {
  RealMatrix logmels;  // [n_frames x n_mels], natural log, floored
  SpectralConfig config;

  Index n_frames() const noexcept { return logmels.rows(); }
  Index n_bins() const noexcept { return logmels.cols(); }
};

struct MelFilterbank {
  RealMatrix weights;  // [n_mels x n_bins]
  RealVector centers_hz;

  /// Same weights in compressed form; each filter touches only a few bins.
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse() const;
};

/// Periodic Hann window of `size` samples, zero-padded and centered in `n_fft`.
RealVector analysis_window(const SpectralConfig& cfg);

/// Reusable analysis/synthesis pair for one configuration and one signal
/// length. Holds the FFT plan, window and overlap-add normalization so that
/// iterative algorithms do not rebuild them every pass. Not thread-safe.
class StftProcessor {
 public:
  StftProcessor(const SpectralConfig& cfg, Index n_frames);
  ~StftProcessor();
  StftProcessor(const StftProcessor&) = delete;
  StftProcessor& operator=(const StftProcessor&) = delete;

  const SpectralConfig& config() const noexcept { return cfg_; }
  Index n_frames() const noexcept { return n_frames_; }
  /// (n_frames - 1) * hop
  Index signal_length() const noexcept { return (n_frames_ - 1) * cfg_.hop_size; }

  /// `samples` must hold at least 1 sample; frames = floor(len/hop)+1 must
  /// equal n_frames().
  void forward(const RealVector& samples, ComplexMatrix& frames);
  void inverse(const ComplexMatrix& frames, RealVector& samples);

 private:
  struct Fft;
  SpectralConfig cfg_;
  Index n_frames_;
  RealVector window_;
  RealVector inv_norm_;  // 1 / window-square sum over the trimmed output
  std::unique_ptr<Fft> fft_;
  RealVector frame_;
  RealVector ola_;
};

/// Centered STFT: reflect-pads n_fft/2 samples each side. Frame count is
/// floor(len / hop) + 1.
ComplexSpectrogram stft(const Waveform& w, const SpectralConfig& cfg);

/// Weighted overlap-add inverse of `stft`. Output length is (n_frames - 1) * hop.
Waveform istft(const ComplexSpectrogram& s);

LinearSpectrogram magnitude(const ComplexSpectrogram& s);

double hz_to_mel(double hz) noexcept;
double mel_to_hz(double mel) noexcept;

/// Triangular filters equally spaced on the HTK mel scale, each scaled to unit
/// area in Hz.
MelFilterbank mel_filterbank(const SpectralConfig& cfg);

/// ln(max(W |X|, floor)) on magnitude spectra.
MelSpectrogram mel_spectrogram(const Waveform& w, const SpectralConfig& cfg);
MelSpectrogram mel_from_linear(const LinearSpectrogram& s, const MelFilterbank& fb);

/// Non-negative least-squares inversion of the filterbank, per frame, by 50
/// multiplicative updates from the transpose projection. Squared residuals
/// are weighted by 1 / max(y, floor), which keeps quiet bands accurate in the
/// log domain.
///
/// Entries sitting at the log floor carry only the information "at most the
/// floor", so they are fitted towards zero rather than towards the floor value.
LinearSpectrogram mel_to_linear(const MelSpectrogram& m, const MelFilterbank& fb);

inline constexpr int kMelInversionIterations = 50;

}  // namespace sraug
