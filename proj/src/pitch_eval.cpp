#include "sraug/pitch_eval.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "sraug/audio_io.hpp"

namespace sraug {

void PitchConfig::validate(int sample_rate) const {
  if (!(f0_min > 0.0 && f0_min < f0_max && f0_max < sample_rate / 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "PitchConfig needs 0 < f0_min < f0_max < sample_rate/2");
  }
  if (frame_size < 4 || hop_size < 1) throw Error(ErrorCode::InvalidArgument, "PitchConfig frame/hop too small");
  if (!(yin_threshold > 0.0 && yin_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "yin_threshold must lie in (0, 1)");
  }
}

std::vector<double> F0Track::voiced() const {
  std::vector<double> out;
  for (double f : f0) {
    if (f > 0.0) out.push_back(f);
  }
  return out;
}

namespace {

// Returns 0 for an unvoiced frame.
double yin_frame(const Eigen::Ref<const RealVector>& x, int sample_rate, const PitchConfig& cfg, Index tau_min,
                 Index tau_max) {
  const Index width = x.size() - tau_max;
  const auto head = x.head(width);

  RealVector cmnd(tau_max + 1);
  cmnd[0] = 1.0;
  double running = 0.0;
  for (Index tau = 1; tau <= tau_max; ++tau) {
    const double d = (head - x.segment(tau, width)).squaredNorm();
    running += d;
    cmnd[tau] = running > 0.0 ? d * static_cast<double>(tau) / running : 1.0;
  }

  Index best = -1;
  for (Index tau = tau_min; tau < tau_max; ++tau) {
    if (cmnd[tau] < cfg.yin_threshold) {
      while (tau + 1 < tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
      best = tau;
      break;
    }
  }
  if (best < 0) return 0.0;

  double refined = static_cast<double>(best);
  const double a = cmnd[best - 1], b = cmnd[best], c = cmnd[best + 1];
  const double curvature = a - 2.0 * b + c;
  if (curvature > 0.0) {
    refined += std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
  }
  const double f0 = sample_rate / refined;
  return (f0 >= cfg.f0_min && f0 <= cfg.f0_max) ? f0 : 0.0;
}

}  // namespace

F0Track yin_f0(const Waveform& w, const PitchConfig& cfg) {
  cfg.validate(w.sample_rate());
  if (w.size() < cfg.frame_size) {
    throw Error(ErrorCode::InputTooShort, "YIN needs at least frame_size = " + std::to_string(cfg.frame_size) +
                                              " samples, got " + std::to_string(w.size()));
  }
  const int sr = w.sample_rate();
  const Index tau_max = std::min<Index>(static_cast<Index>(std::ceil(sr / cfg.f0_min)) + 1, cfg.frame_size / 2);
  const Index tau_min = std::max<Index>(2, static_cast<Index>(std::floor(sr / cfg.f0_max)));
  if (tau_min + 1 >= tau_max) throw Error(ErrorCode::InvalidArgument, "frame_size too short for f0 range");

  F0Track track;
  track.hop_size = cfg.hop_size;
  track.frame_size = cfg.frame_size;
  track.sample_rate = sr;
  const Index n_frames = (w.size() - cfg.frame_size) / cfg.hop_size + 1;
  track.f0.resize(static_cast<std::size_t>(n_frames));
  for (Index i = 0; i < n_frames; ++i) {
    track.f0[static_cast<std::size_t>(i)] =
        yin_frame(w.samples().segment(i * cfg.hop_size, cfg.frame_size), sr, cfg, tau_min, tau_max);
  }
  return track;
}

double median_f0(const F0Track& track) {
  std::vector<double> v = track.voiced();
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  using ConstMap = Eigen::Map<const Eigen::VectorXd>;
  return pearson(ConstMap(x.data(), static_cast<Index>(x.size())), ConstMap(y.data(), static_cast<Index>(y.size())));
}

double f0_pcc(const Waveform& source, const Waveform& converted, const PitchConfig& cfg) {
  const F0Track a = yin_f0(source, cfg);
  const F0Track b = converted.sample_rate() == source.sample_rate()
                        ? yin_f0(converted, cfg)
                        : yin_f0(resample(converted, source.sample_rate()), cfg);
  const std::size_t n = std::min(a.f0.size(), b.f0.size());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.f0[i] > 0.0 && b.f0[i] > 0.0) {
      xs.push_back(a.f0[i]);
      ys.push_back(b.f0[i]);
    }
  }
  if (xs.size() < kMinCoVoicedFrames) {
    throw Error(ErrorCode::InsufficientVoicedOverlap,
                std::to_string(xs.size()) + " frames voiced in both signals, need " +
                    std::to_string(kMinCoVoicedFrames));
  }
  return pearson(xs, ys);
}

void write_f0_csv(std::ostream& out, const F0Track& track) {
  out << "frame,time_sec,f0_hz\n";
  char line[96];
  for (std::size_t i = 0; i < track.f0.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", i, track.frame_time(i), track.f0[i]);
    out << line;
  }
}

void write_f0_csv(const std::filesystem::path& path, const F0Track& track) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  write_f0_csv(out, track);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace sraug
