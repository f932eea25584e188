#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "oracles.hpp"
#include "synth.hpp"
#include "test_util.hpp"
#include "sraug/error.hpp"
#include "sraug/melf.hpp"
#include "sraug/spectral.hpp"

using namespace sraug;
using namespace sraug::testing;

namespace {

/// Frame t of a centered, reflect-padded, Hann-windowed signal.
Eigen::VectorXd reference_frame(const RealVector& x, Index t, const SpectralConfig& cfg) {
  const Index n = x.size();
  const Index pad = cfg.n_fft / 2;
  const Eigen::VectorXd win = hann_periodic(cfg.win_size);
  const Index off = (cfg.n_fft - cfg.win_size) / 2;
  Eigen::VectorXd frame = Eigen::VectorXd::Zero(cfg.n_fft);
  for (Index j = 0; j < cfg.win_size; ++j) {
    Index i = t * cfg.hop_size + off + j - pad;
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    frame[off + j] = x[i] * win[j];
  }
  return frame;
}

const double kLogFloor = std::log(1e-5);

}  // namespace

TEST_CASE("SpectralConfig validation") {
  SpectralConfig ok;
  CHECK_NOTHROW(ok.validate());
  auto bad = [](auto mutate) {
    SpectralConfig c;
    mutate(c);
    CHECK_THROWS_CODE(c.validate(), ErrorCode::InvalidArgument);
  };
  bad([](SpectralConfig& c) { c.win_size = 2048; });
  bad([](SpectralConfig& c) { c.hop_size = 2000; });
  bad([](SpectralConfig& c) { c.fmax = 9000; });
  bad([](SpectralConfig& c) { c.fmin = 8000; });
  bad([](SpectralConfig& c) { c.n_mels = 0; });
  bad([](SpectralConfig& c) { c.log_floor = 0; });
}

TEST_CASE("stft") {
  const SpectralConfig cfg;

  SUBCASE("shape follows floor(len/hop)+1") {
    const auto s = stft(white_noise(1.0, 16000, 1), cfg);
    CHECK(s.frames.rows() == 51);
    CHECK(s.frames.cols() == 641);
    CHECK(stft(white_noise(321.0 / 16000, 16000, 1), cfg).frames.rows() == 2);
  }
  SUBCASE("zero in, zero out") {
    const auto s = stft(Waveform(RealVector::Zero(16000), 16000), cfg);
    CHECK(s.frames.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("1 kHz sine peaks at bin 80 and matches a direct DFT") {
    const Waveform w = sine(1000.0, 1.0, 16000, 1.0);
    const auto s = stft(w, cfg);
    // Edge frames see the mirrored padding, whose phase flip cancels bin 80.
    const Index first_full = (cfg.n_fft / 2 + cfg.hop_size - 1) / cfg.hop_size;
    const Index last_full = (w.size() - cfg.n_fft / 2) / cfg.hop_size;
    for (Index t = first_full; t <= last_full; ++t) {
      Index arg = 0;
      s.frames.row(t).cwiseAbs().maxCoeff(&arg);
      CHECK(arg == 80);
    }
    for (Index t : {Index{0}, Index{1}, Index{25}, Index{50}}) {
      const Eigen::VectorXcd ref = direct_dft(reference_frame(w.samples(), t, cfg));
      const double err = (s.frames.row(t).transpose() - ref).cwiseAbs().maxCoeff();
      CHECK(err <= 1e-9 * ref.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("short window is centered inside the FFT frame") {
    SpectralConfig c = cfg;
    c.win_size = 800;
    c.hop_size = 200;
    const Waveform w = white_noise(0.3, 16000, 4);
    const auto s = stft(w, c);
    for (Index t : {Index{0}, Index{7}, s.frames.rows() - 1}) {
      const Eigen::VectorXcd ref = direct_dft(reference_frame(w.samples(), t, c));
      CHECK((s.frames.row(t).transpose() - ref).cwiseAbs().maxCoeff() <= 1e-9 * ref.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("rate mismatch") {
    CHECK_THROWS_CODE(stft(white_noise(0.1, 22050, 1), cfg), ErrorCode::ConfigMismatch);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_CODE(stft(Waveform(RealVector(0), 16000), cfg), ErrorCode::InputTooShort);
  }
  SUBCASE("Parseval: frame energy equals window-weighted signal energy") {
    const Waveform w = white_noise(4.0, 16000, 21);
    const auto s = stft(w, cfg);
    const Index k_last = s.frames.cols() - 1;
    double spec = 2.0 * s.frames.cwiseAbs2().sum() - s.frames.col(0).cwiseAbs2().sum() -
                  s.frames.col(k_last).cwiseAbs2().sum();
    spec /= cfg.n_fft;
    const double wsq = hann_periodic(cfg.win_size).squaredNorm();
    const double expected = w.samples().squaredNorm() * wsq / cfg.hop_size;
    CHECK(std::abs(spec / expected - 1.0) < 0.01);
  }
}

TEST_CASE("istft") {
  const SpectralConfig cfg;

  SUBCASE("round trip on noise") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Waveform w = white_noise(4.0 * cfg.n_fft / 16000.0 + 0.01 * seed, 16000, seed);
      const Waveform back = istft(stft(w, cfg));
      const Index len = back.size();
      REQUIRE(len == (w.size() / cfg.hop_size) * cfg.hop_size);
      const Index edge = cfg.n_fft / 2;
      const auto ref = w.samples().segment(edge, len - 2 * edge);
      const auto est = back.samples().segment(edge, len - 2 * edge);
      CHECK((ref - est).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(snr_db(ref, est) > 60.0);
    }
  }
  SUBCASE("zero spectrogram") {
    ComplexSpectrogram s{ComplexMatrix::Zero(10, cfg.n_bins()), cfg};
    const Waveform w = istft(s);
    CHECK(w.size() == 9 * cfg.hop_size);
    CHECK(w.samples().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single frame trims to nothing") {
    const auto s = stft(Waveform(RealVector::Ones(1), 16000), cfg);
    REQUIRE(s.frames.rows() == 1);
    CHECK(istft(s).size() == 0);
  }
  SUBCASE("window sum vanishing somewhere") {
    SpectralConfig c;
    c.n_fft = c.win_size = c.hop_size = 64;
    c.n_mels = 8;
    ComplexSpectrogram s{ComplexMatrix::Zero(4, c.n_bins()), c};
    CHECK_THROWS_CODE(istft(s), ErrorCode::DegenerateWindowSum);
  }
  SUBCASE("deterministic") {
    const Waveform w = white_noise(0.5, 16000, 8);
    const auto a = stft(w, cfg);
    const auto b = stft(w, cfg);
    CHECK(a.frames == b.frames);
    CHECK(istft(a).samples() == istft(b).samples());
  }
}

TEST_CASE("mel filterbank") {
  const SpectralConfig cfg;
  const MelFilterbank fb = mel_filterbank(cfg);
  REQUIRE(fb.weights.rows() == 80);
  REQUIRE(fb.weights.cols() == 641);
  CHECK(fb.weights.minCoeff() >= 0.0);
  for (Index m = 0; m < fb.weights.rows(); ++m) CHECK(fb.weights.row(m).maxCoeff() > 0.0);

  CHECK(fb.centers_hz[0] > cfg.fmin);
  CHECK(fb.centers_hz[0] < fb.centers_hz[1]);
  for (Index m = 1; m < fb.centers_hz.size(); ++m) CHECK(fb.centers_hz[m] > fb.centers_hz[m - 1]);

  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.n_fft;
  const RealVector total = fb.weights.colwise().sum().transpose();
  for (Index k = 0; k < total.size(); ++k) {
    const double f = k * bin_hz;
    if (f >= fb.centers_hz[0] && f <= fb.centers_hz[fb.centers_hz.size() - 1]) CHECK(total[k] > 0.0);
  }

  // Independent HTK mel points and the 2/(hi-lo) area scaling.
  const auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  const auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double m_lo = mel(cfg.fmin);
  const double m_hi = mel(cfg.fmax);
  for (Index m : {Index{0}, Index{17}, Index{79}}) {
    const double lo = hz(m_lo + (m_hi - m_lo) * m / 81.0);
    const double c = hz(m_lo + (m_hi - m_lo) * (m + 1) / 81.0);
    const double hi = hz(m_lo + (m_hi - m_lo) * (m + 2) / 81.0);
    CHECK(fb.centers_hz[m] == doctest::Approx(c).epsilon(1e-12));
    for (Index k = 0; k < fb.weights.cols(); ++k) {
      const double f = k * bin_hz;
      const double tri = std::max(0.0, std::min((f - lo) / (c - lo), (hi - f) / (hi - c)));
      CHECK(fb.weights(m, k) == doctest::Approx(tri * 2.0 / (hi - lo)).epsilon(1e-9));
    }
  }
  CHECK(Eigen::MatrixXd(fb.sparse()) == Eigen::MatrixXd(fb.weights));
  CHECK(hz_to_mel(mel_to_hz(1234.5)) == doctest::Approx(1234.5));
}

TEST_CASE("mel_spectrogram") {
  const SpectralConfig cfg;

  SUBCASE("silence sits at the floor") {
    const auto m = mel_spectrogram(Waveform(RealVector::Zero(16000), 16000), cfg);
    CHECK(m.n_frames() == 51);
    CHECK(m.n_bins() == 80);
    CHECK(m.logmels.maxCoeff() == kLogFloor);
    CHECK(m.logmels.minCoeff() == kLogFloor);
    CHECK(kLogFloor == doctest::Approx(-11.5129).epsilon(1e-5));
  }
  SUBCASE("pure tone is stationary") {
    const auto m = mel_spectrogram(sine(200.0, 1.0, 16000), cfg);
    Index first = -1;
    for (Index t = 3; t < m.n_frames() - 3; ++t) {
      Index arg = 0;
      m.logmels.row(t).maxCoeff(&arg);
      if (first < 0) first = arg;
      CHECK(arg == first);
    }
  }
  SUBCASE("matches the filterbank applied to direct-DFT magnitudes") {
    const Waveform w = speech_like(3, 150.0, 0.4, 16000);
    const auto m = mel_spectrogram(w, cfg);
    const MelFilterbank fb = mel_filterbank(cfg);
    for (Index t : {Index{0}, Index{9}, m.n_frames() - 1}) {
      const Eigen::VectorXd mag = direct_dft(reference_frame(w.samples(), t, cfg)).cwiseAbs();
      const Eigen::VectorXd ref = (fb.weights * mag).cwiseMax(1e-5).array().log();
      CHECK((m.logmels.row(t).transpose() - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("louder input never lowers an entry above the floor") {
    const Waveform w = speech_like(5, 140.0, 1.0, 16000);
    const auto base = mel_spectrogram(w, cfg);
    for (double a : {1.01, 1.5, 3.0}) {
      const auto loud = mel_spectrogram(Waveform(RealVector(a * w.samples()), 16000), cfg);
      const auto above = (base.logmels.array() > kLogFloor);
      CHECK((above && (loud.logmels.array() < base.logmels.array())).count() == 0);
      CHECK((loud.logmels.array() >= kLogFloor).all());
    }
  }
}

TEST_CASE("mel_to_linear") {
  const SpectralConfig cfg;
  const MelFilterbank fb = mel_filterbank(cfg);

  SUBCASE("silence inverts to near zero") {
    const auto m = mel_spectrogram(Waveform(RealVector::Zero(16000), 16000), cfg);
    const auto lin = mel_to_linear(m, fb);
    CHECK(lin.mags.maxCoeff() <= 1e-4);
    CHECK(lin.mags.minCoeff() >= 0.0);
  }
  SUBCASE("round trip on speech-like input") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto m = mel_spectrogram(speech_like(seed, 110.0 + 40.0 * seed, 2.0, 16000), cfg);
      const auto lin = mel_to_linear(m, fb);
      CHECK(lin.mags.minCoeff() >= 0.0);
      const auto back = mel_from_linear(lin, fb);
      CHECK((back.logmels - m.logmels).cwiseAbs().maxCoeff() <= 0.15);
    }
  }
  SUBCASE("single active band stays inside its filter support") {
    for (Index band : {Index{5}, Index{40}, Index{79}}) {
      MelSpectrogram m{RealMatrix::Constant(4, 80, kLogFloor), cfg};
      m.logmels.col(band).setConstant(0.0);
      const auto lin = mel_to_linear(m, fb);
      double inside = 0.0;
      for (Index k = 0; k < fb.weights.cols(); ++k)
        if (fb.weights(band, k) > 0.0) inside += lin.mags.col(k).squaredNorm();
      CHECK(inside >= 0.99 * lin.mags.squaredNorm());
    }
  }
  SUBCASE("mismatched filterbank") {
    SpectralConfig small = cfg;
    small.n_mels = 40;
    const auto m = mel_spectrogram(sine(300, 0.2, 16000), cfg);
    CHECK_THROWS_CODE(mel_to_linear(m, mel_filterbank(small)), ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("MELF container") {
  SpectralConfig cfg;
  MelSpectrogram m{RealMatrix(2, 3), cfg};
  m.logmels << -1.5, 0.1, 2.0, -11.5, 3.25, 0.0;

  std::stringstream buf;
  write_melf(buf, m);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 24 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "MELF");
  auto u32 = [&](int off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
    return v;
  };
  CHECK(u32(4) == 1);
  CHECK(u32(8) == 2);
  CHECK(u32(12) == 3);
  CHECK(u32(16) == 16000);
  CHECK(u32(20) == 320);
  const float expected[] = {-1.5f, 0.1f, 2.0f, -11.5f, 3.25f, 0.0f};
  for (int i = 0; i < 6; ++i) {
    const std::uint32_t bits = u32(24 + 4 * i);
    float f;
    std::memcpy(&f, &bits, 4);
    CHECK(f == expected[i]);
  }

  std::stringstream in(bytes);
  const MelSpectrogram back = read_melf(in);
  CHECK(back.n_frames() == 2);
  CHECK(back.n_bins() == 3);
  CHECK(back.config.hop_size == 320);
  CHECK(back.logmels(0, 1) == static_cast<double>(0.1f));
  CHECK(back.logmels(1, 0) == -11.5);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream s1(bad_magic);
  CHECK_THROWS_CODE(read_melf(s1), ErrorCode::MalformedContainer);

  std::string bad_version = bytes;
  bad_version[4] = 2;
  std::stringstream s2(bad_version);
  CHECK_THROWS_CODE(read_melf(s2), ErrorCode::UnsupportedFormat);

  std::stringstream s3(bytes.substr(0, bytes.size() - 2));
  CHECK_THROWS_CODE(read_melf(s3), ErrorCode::MalformedContainer);

  ScratchDir dir("melf");
  write_melf(dir / "a.melf", m);
  CHECK(read_bytes(dir / "a.melf").size() == bytes.size());
  CHECK(read_melf(dir / "a.melf").logmels == back.logmels);
}
