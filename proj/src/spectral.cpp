#include "sraug/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "sraug/error.hpp"

namespace sraug {

void SpectralConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "SpectralConfig: " + what); };
  if (n_fft < 4 || n_fft % 2 != 0) fail("n_fft must be even and >= 4");
  if (win_size < 1 || win_size > n_fft) fail("need 1 <= win_size <= n_fft");
  if (hop_size < 1 || hop_size > win_size) fail("need 1 <= hop_size <= win_size");
  if (n_mels < 1) fail("n_mels must be positive");
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) fail("need 0 <= fmin < fmax <= sample_rate/2");
  if (!(log_floor > 0.0) || !std::isfinite(log_floor)) fail("log_floor must be positive");
}

RealVector analysis_window(const SpectralConfig& cfg) {
  RealVector w = RealVector::Zero(cfg.n_fft);
  const int offset = (cfg.n_fft - cfg.win_size) / 2;
  for (int n = 0; n < cfg.win_size; ++n) {
    w[offset + n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.win_size);
  }
  return w;
}

namespace {

// Mirror without repeating the edge sample; folds repeatedly for short input.
Index reflect_index(Index i, Index len) {
  if (len == 1) return 0;
  const Index period = 2 * (len - 1);
  i %= period;
  if (i < 0) i += period;
  return i < len ? i : period - i;
}

}  // namespace

struct StftProcessor::Fft {
  explicit Fft(int n) : n_fft(n) { fft.SetFlag(Eigen::FFT<double>::HalfSpectrum); }
  Eigen::FFT<double> fft;
  int n_fft;
};

StftProcessor::StftProcessor(const SpectralConfig& cfg, Index n_frames)
    : cfg_(cfg), n_frames_(n_frames), window_(analysis_window(cfg)), fft_(std::make_unique<Fft>(cfg.n_fft)),
      frame_(cfg.n_fft) {
  cfg_.validate();
  if (n_frames_ < 1) throw Error(ErrorCode::InvalidArgument, "StftProcessor needs at least one frame");
  const Index hop = cfg_.hop_size;
  const Index out_len = signal_length();
  RealVector norm = RealVector::Zero(cfg_.n_fft + out_len);
  for (Index t = 0; t < n_frames_; ++t) norm.segment(t * hop, cfg_.n_fft) += window_.cwiseAbs2();
  const auto denom = norm.segment(cfg_.n_fft / 2, out_len);
  if ((denom.array() < 1e-9).any()) {
    throw Error(ErrorCode::DegenerateWindowSum, "window overlap sum vanishes; hop too large for the window");
  }
  inv_norm_ = denom.cwiseInverse();
  ola_.resize(cfg_.n_fft + out_len);
}

StftProcessor::~StftProcessor() = default;

void StftProcessor::forward(const RealVector& x, ComplexMatrix& frames) {
  const Index len = x.size();
  if (len < 1 || len / cfg_.hop_size + 1 != n_frames_) {
    throw Error(ErrorCode::DimensionMismatch, "signal length does not give the configured frame count");
  }
  const Index n_fft = cfg_.n_fft;
  const Index pad = n_fft / 2;
  frames.resize(n_frames_, cfg_.n_bins());
  for (Index t = 0; t < n_frames_; ++t) {
    const Index start = t * cfg_.hop_size - pad;
    if (start >= 0 && start + n_fft <= len) {
      frame_ = window_.cwiseProduct(x.segment(start, n_fft));
    } else {
      for (Index n = 0; n < n_fft; ++n) frame_[n] = window_[n] * x[reflect_index(start + n, len)];
    }
    fft_->fft.fwd(frames.row(t).data(), frame_.data(), n_fft);
  }
}

void StftProcessor::inverse(const ComplexMatrix& frames, RealVector& y) {
  if (frames.rows() != n_frames_ || frames.cols() != cfg_.n_bins()) {
    throw Error(ErrorCode::DimensionMismatch, "spectrogram shape does not match the processor");
  }
  const Index n_fft = cfg_.n_fft;
  ola_.setZero();
  for (Index t = 0; t < n_frames_; ++t) {
    fft_->fft.inv(frame_.data(), frames.row(t).data(), n_fft);
    ola_.segment(t * cfg_.hop_size, n_fft) += frame_.cwiseProduct(window_);
  }
  y = ola_.segment(n_fft / 2, signal_length()).cwiseProduct(inv_norm_);
}

ComplexSpectrogram stft(const Waveform& w, const SpectralConfig& cfg) {
  cfg.validate();
  if (w.sample_rate() != cfg.sample_rate) {
    throw Error(ErrorCode::ConfigMismatch, "waveform rate " + std::to_string(w.sample_rate()) +
                                               " != config rate " + std::to_string(cfg.sample_rate));
  }
  if (w.empty()) throw Error(ErrorCode::InputTooShort, "stft of an empty waveform");
  StftProcessor proc(cfg, w.size() / cfg.hop_size + 1);
  ComplexSpectrogram out{ComplexMatrix(), cfg};
  proc.forward(w.samples(), out.frames);
  return out;
}

Waveform istft(const ComplexSpectrogram& s) {
  const SpectralConfig& cfg = s.config;
  cfg.validate();
  if (s.frames.cols() != cfg.n_bins()) {
    throw Error(ErrorCode::DimensionMismatch, "spectrogram has " + std::to_string(s.frames.cols()) +
                                                  " bins, config expects " + std::to_string(cfg.n_bins()));
  }
  if (s.frames.rows() <= 1) return Waveform(RealVector(0), cfg.sample_rate);
  StftProcessor proc(cfg, s.frames.rows());
  RealVector y;
  proc.inverse(s.frames, y);
  return Waveform(std::move(y), cfg.sample_rate);
}

LinearSpectrogram magnitude(const ComplexSpectrogram& s) {
  return {s.frames.cwiseAbs(), s.config};
}

double hz_to_mel(double hz) noexcept { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) noexcept { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(const SpectralConfig& cfg) {
  cfg.validate();
  const int n_mels = cfg.n_mels;
  const int n_bins = cfg.n_bins();
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (n_mels + 1));
  }

  MelFilterbank fb{RealMatrix::Zero(n_mels, n_bins), RealVector(n_mels)};
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    const double area_norm = 2.0 / (hi - lo);
    fb.centers_hz[m] = center;
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      const double rise = (f - lo) / (center - lo);
      const double fall = (hi - f) / (hi - center);
      const double tri = std::max(0.0, std::min(rise, fall));
      fb.weights(m, k) = tri * area_norm;
    }
    if (!(fb.weights.row(m).maxCoeff() > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "mel filter " + std::to_string(m) + " covers no FFT bin; reduce n_mels or raise n_fft");
    }
  }
  return fb;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> MelFilterbank::sparse() const {
  return weights.sparseView();
}

MelSpectrogram mel_from_linear(const LinearSpectrogram& s, const MelFilterbank& fb) {
  if (s.mags.cols() != fb.weights.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "linear spectrogram bins do not match filterbank");
  }
  const auto w = fb.sparse();
  RealMatrix mel = s.mags * w.transpose();
  SpectralConfig cfg = s.config;
  cfg.n_mels = static_cast<int>(fb.weights.rows());
  return {mel.array().max(cfg.log_floor).log().matrix(), cfg};
}

MelSpectrogram mel_spectrogram(const Waveform& w, const SpectralConfig& cfg) {
  return mel_from_linear(magnitude(stft(w, cfg)), mel_filterbank(cfg));
}

LinearSpectrogram mel_to_linear(const MelSpectrogram& m, const MelFilterbank& fb) {
  if (m.logmels.cols() != fb.weights.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "mel spectrogram has " + std::to_string(m.logmels.cols()) +
                                                  " bins, filterbank has " + std::to_string(fb.weights.rows()));
  }
  // Floored entries are fitted towards zero; a small margin absorbs the f32
  // rounding of MELF round trips.
  const double floor_level = std::log(m.config.log_floor) + 1e-4;
  const RealMatrix target = (m.logmels.array() > floor_level).select(m.logmels.array().exp(), 0.0);

  const Eigen::SparseMatrix<double, Eigen::RowMajor> w = fb.sparse();

  // Squared residuals are weighted by 1 / max(y, floor). Unweighted, quiet
  // bands between resolved harmonics are fitted to absolute accuracy only and
  // come back tens of dB off in the log domain.
  const RealMatrix weight = target.array().max(m.config.log_floor).inverse();
  const RealMatrix numer = (target.array() * weight.array()).matrix() * w;

  // Transpose projection, rescaled per frame to the least-squares optimum
  // along its own direction.
  RealMatrix x = target * w;
  {
    const RealMatrix proj = x * w.transpose();
    const Eigen::VectorXd num = (proj.array() * target.array()).rowwise().sum();
    const Eigen::VectorXd den = proj.array().square().rowwise().sum();
    for (Index t = 0; t < x.rows(); ++t) {
      if (den[t] > 0.0) x.row(t) *= num[t] / den[t];
    }
  }

  constexpr double kTiny = 1e-300;
  for (int it = 0; it < kMelInversionIterations; ++it) {
    const RealMatrix fitted = x * w.transpose();
    const RealMatrix denom = (fitted.array() * weight.array()).matrix() * w;
    x.array() *= numer.array() / (denom.array() + kTiny);
  }
  return {x, m.config};
}

}  // namespace sraug
