#include "sraug/vocoder.hpp"

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sraug/audio_io.hpp"
#include "sraug/error.hpp"
#include "sraug/melf.hpp"
#include "sraug/random.hpp"

namespace sraug {

void GriffinLimConfig::validate() const {
  if (n_iters < 1) throw Error(ErrorCode::InvalidArgument, "Griffin-Lim needs n_iters >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Griffin-Lim momentum must lie in [0, 1)");
  }
}

namespace {

constexpr double kPhaseEps = 1e-16;

Waveform peak_limited(Waveform w) {
  if (w.empty()) return w;
  const double peak = w.samples().cwiseAbs().maxCoeff();
  if (peak <= kPeakLimit) return w;
  return Waveform(RealVector(w.samples() * (kPeakLimit / peak)), w.sample_rate());
}

}  // namespace

Waveform griffin_lim(const LinearSpectrogram& s, const GriffinLimConfig& cfg) {
  cfg.validate();
  s.config.validate();
  if (s.mags.cols() != s.config.n_bins()) {
    throw Error(ErrorCode::DimensionMismatch, "magnitude bins do not match n_fft/2+1");
  }
  if ((s.mags.array() < 0.0).any() || !s.mags.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "magnitudes must be finite and non-negative");
  }
  if (s.mags.rows() <= 1) return Waveform(RealVector(0), s.config.sample_rate);

  const Index rows = s.mags.rows(), cols = s.mags.cols();
  ComplexMatrix angles(rows, cols);
  if (cfg.init == PhaseInit::Zero) {
    angles.setOnes();
  } else {
    Rng rng(cfg.seed);
    for (Index t = 0; t < rows; ++t) {
      for (Index k = 0; k < cols; ++k) {
        angles(t, k) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));
      }
    }
  }

  const double beta = cfg.momentum / (1.0 + cfg.momentum);
  StftProcessor proc(s.config, rows);
  ComplexMatrix spec(rows, cols);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(rows, cols);
  ComplexMatrix previous(rows, cols);
  RealVector signal;
  for (int it = 0; it < cfg.n_iters; ++it) {
    spec = angles.cwiseProduct(s.mags.cast<std::complex<double>>());
    proc.inverse(spec, signal);
    previous.swap(rebuilt);
    proc.forward(signal, rebuilt);
    angles = rebuilt - beta * previous;
    const RealMatrix scale = (angles.cwiseAbs().array() + kPhaseEps).inverse();
    angles.array() *= scale.array().cast<std::complex<double>>();
  }
  spec = angles.cwiseProduct(s.mags.cast<std::complex<double>>());
  proc.inverse(spec, signal);
  return peak_limited(Waveform(std::move(signal), s.config.sample_rate));
}

double spectral_convergence(const Waveform& w, const LinearSpectrogram& s) {
  const RealMatrix mags = stft(w, s.config).frames.cwiseAbs();
  if (mags.rows() != s.mags.rows() || mags.cols() != s.mags.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "waveform does not cover the spectrogram's frames");
  }
  const double ref = s.mags.norm();
  const double diff = (mags - s.mags).norm();
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / ref;
}

Waveform reconstruct_from_mel(const MelSpectrogram& m, const GriffinLimConfig& cfg) {
  const MelFilterbank fb = mel_filterbank(m.config);
  return griffin_lim(mel_to_linear(m, fb), cfg);
}

namespace {

class TempDir {
 public:
  TempDir() {
    static std::atomic<std::uint64_t> counter{0};
    const auto now = std::chrono::steady_clock::now().time_since_epoch().count();
    const std::uint64_t token = mix64(static_cast<std::uint64_t>(now) ^ (counter.fetch_add(1) << 32) ^
                                      static_cast<std::uint64_t>(::getpid()));
    char name[64];
    std::snprintf(name, sizeof name, "sraug-voc-%d-%016llx", static_cast<int>(::getpid()),
                  static_cast<unsigned long long>(token));
    path_ = std::filesystem::temp_directory_path() / name;
    std::error_code ec;
    if (!std::filesystem::create_directory(path_, ec) || ec) {
      throw Error(ErrorCode::IoFailure, "cannot create temp directory " + path_.string());
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

struct ProcessResult {
  int status = 0;
  bool timed_out = false;
  std::string output;
};

ProcessResult run_shell(const std::string& command, std::chrono::seconds timeout) {
  int fds[2];
  if (::pipe(fds) != 0) throw Error(ErrorCode::VocoderProcessFailure, "pipe() failed");
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw Error(ErrorCode::VocoderProcessFailure, "fork() failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    ::dup2(fds[1], STDERR_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(fds[1]);

  constexpr std::size_t kKeep = 4096;
  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  char buf[1024];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    const ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    result.output.append(buf, static_cast<std::size_t>(n));
    if (result.output.size() > 2 * kKeep) result.output.erase(0, result.output.size() - kKeep);
  }
  ::close(fds[0]);
  if (result.timed_out) ::kill(-pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.status = status;
  if (result.output.size() > kKeep) result.output.erase(0, result.output.size() - kKeep);
  return result;
}

}  // namespace

Waveform external_vocoder(const MelSpectrogram& m, const std::string& command_template,
                          const ExternalVocoderOptions& options) {
  if (command_template.find("{mel}") == std::string::npos || command_template.find("{wav}") == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "vocoder command template needs both {mel} and {wav}");
  }
  TempDir dir;
  const auto mel_path = dir.path() / "input.melf";
  const auto wav_path = dir.path() / "output.wav";
  write_melf(mel_path, m);

  std::string command = command_template;
  replace_all(command, "{mel}", mel_path.string());
  replace_all(command, "{wav}", wav_path.string());

  const ProcessResult r = run_shell(command, options.timeout);
  if (r.timed_out) {
    throw Error(ErrorCode::VocoderProcessFailure,
                "vocoder timed out after " + std::to_string(options.timeout.count()) + " s: " + r.output);
  }
  if (!WIFEXITED(r.status) || WEXITSTATUS(r.status) != 0) {
    const int code = WIFEXITED(r.status) ? WEXITSTATUS(r.status) : -1;
    throw Error(ErrorCode::VocoderProcessFailure,
                "vocoder exited with status " + std::to_string(code) + ": " + r.output);
  }
  if (!std::filesystem::exists(wav_path)) {
    throw Error(ErrorCode::VocoderOutputMissing, "vocoder did not write " + wav_path.string());
  }
  Waveform w = read_wav(wav_path);
  if (w.sample_rate() != m.config.sample_rate) w = resample(w, m.config.sample_rate);
  return w;
}

}  // namespace sraug
