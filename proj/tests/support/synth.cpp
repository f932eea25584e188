#include "synth.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "sraug/random.hpp"

namespace sraug::testing {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vowel {
  std::array<double, 3> formants;
  std::array<double, 3> bandwidths;
};

constexpr std::array<Vowel, 5> kVowels{{
    {{730, 1090, 2440}, {80, 90, 120}},  // a
    {{270, 2290, 3010}, {60, 100, 120}},  // i
    {{300, 870, 2240}, {60, 90, 110}},  // u
    {{530, 1840, 2480}, {70, 100, 120}},  // e
    {{570, 840, 2410}, {70, 90, 120}},  // o
}};

// Magnitude of a cascade of resonators at frequency f.
double envelope(const Vowel& v, double f) {
  double g = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double fc = v.formants[i], bw = v.bandwidths[i];
    const double num = fc * fc + (bw / 2) * (bw / 2);
    const double den = std::sqrt(std::pow(f - fc, 2) + (bw / 2) * (bw / 2)) *
                       std::sqrt(std::pow(f + fc, 2) + (bw / 2) * (bw / 2));
    g *= num / den;
  }
  return g;
}

}  // namespace

Waveform sine(double hz, double seconds, int rate, double amplitude, double phase) {
  const Index n = static_cast<Index>(std::llround(seconds * rate));
  RealVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = amplitude * std::sin(kTwoPi * hz * i / rate + phase);
  return Waveform(std::move(x), rate);
}

Waveform glide(double f_start, double f_end, double seconds, int rate, int harmonics, double amplitude) {
  const Index n = static_cast<Index>(std::llround(seconds * rate));
  RealVector x(n);
  double phase = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double f = f_start + (f_end - f_start) * static_cast<double>(i) / static_cast<double>(n);
    double s = 0.0;
    for (int h = 1; h <= harmonics; ++h) s += std::sin(h * phase) / h;
    x[i] = amplitude * s / (harmonics > 1 ? 1.6 : 1.0);
    phase += kTwoPi * f / rate;
  }
  return Waveform(std::move(x), rate);
}

Waveform white_noise(double seconds, int rate, std::uint64_t seed, double amplitude) {
  const Index n = static_cast<Index>(std::llround(seconds * rate));
  Rng rng(seed);
  RealVector x(n);
  for (Index i = 0; i < n; ++i) x[i] = amplitude * (2.0 * uniform01(rng) - 1.0);
  return Waveform(std::move(x), rate);
}

Waveform vowel_tone(double f0, double seconds, int rate, double amplitude) {
  const Index n = static_cast<Index>(std::llround(seconds * rate));
  const Vowel& v = kVowels[0];
  const int harmonics = static_cast<int>(std::min(4000.0, rate / 2.0 - 200) / f0);
  std::vector<double> gains;
  double total = 0.0;
  for (int h = 1; h <= harmonics; ++h) {
    gains.push_back(envelope(v, h * f0) / h);
    total += gains.back();
  }
  RealVector x = RealVector::Zero(n);
  for (int h = 1; h <= harmonics; ++h) {
    const double g = gains[static_cast<std::size_t>(h - 1)] / total;
    for (Index i = 0; i < n; ++i) x[i] += g * std::sin(kTwoPi * h * f0 * i / rate);
  }
  x *= amplitude / x.cwiseAbs().maxCoeff();
  return Waveform(std::move(x), rate);
}

Waveform speech_like(std::uint64_t seed, double base_f0, double seconds, int rate) {
  Rng rng(seed);
  const Index n = static_cast<Index>(std::llround(seconds * rate));
  RealVector x = RealVector::Zero(n);

  Index pos = static_cast<Index>(0.08 * rate);
  double phase = 0.0;
  while (pos < n - static_cast<Index>(0.1 * rate)) {
    // Unvoiced onset burst.
    const Index burst = static_cast<Index>((0.02 + 0.03 * uniform01(rng)) * rate);
    for (Index i = 0; i < burst && pos + i < n; ++i) {
      const double env = std::sin(std::numbers::pi * i / burst);
      x[pos + i] += 0.05 * env * (2.0 * uniform01(rng) - 1.0);
    }
    pos += burst;

    // Voiced nucleus: F0 follows a rise-fall with a random slope.
    const Vowel& v = kVowels[static_cast<std::size_t>(rng() % kVowels.size())];
    const Index len = std::min<Index>(n - pos, static_cast<Index>((0.35 + 0.25 * uniform01(rng)) * rate));
    const double f_begin = base_f0 * (0.92 + 0.12 * uniform01(rng));
    const double f_peak = base_f0 * (1.06 + 0.12 * uniform01(rng));
    const double f_end = base_f0 * (0.85 + 0.1 * uniform01(rng));
    const double amp = 0.25 + 0.2 * uniform01(rng);
    for (Index i = 0; i < len; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(len);
      const double f0 = u < 0.4 ? f_begin + (f_peak - f_begin) * u / 0.4 : f_peak + (f_end - f_peak) * (u - 0.4) / 0.6;
      const double env = std::min(1.0, 8.0 * std::min(u, 1.0 - u));
      double s = 0.0;
      for (int h = 1; h * f0 < 3800.0; ++h) s += envelope(v, h * f0) / h * std::sin(h * phase);
      // Breath noise keeps harmonic valleys at a realistic depth.
      x[pos + i] += amp * env * (s + 0.02 * (2.0 * uniform01(rng) - 1.0));
      phase = std::fmod(phase + kTwoPi * f0 / rate, kTwoPi);
    }
    pos += len;
    pos += static_cast<Index>((0.02 + 0.05 * uniform01(rng)) * rate);  // pause
  }
  const double peak = x.cwiseAbs().maxCoeff();
  if (peak > 0.0) x *= 0.8 / peak;
  for (Index i = 0; i < n; ++i) x[i] += 3e-4 * (2.0 * uniform01(rng) - 1.0);  // room noise
  return Waveform(std::move(x), rate);
}

std::vector<Waveform> mini_corpus() {
  std::vector<Waveform> out;
  const std::array<double, 10> f0s{110, 125, 140, 160, 180, 200, 215, 230, 105, 190};
  for (std::size_t i = 0; i < f0s.size(); ++i) {
    out.push_back(speech_like(1000 + i, f0s[i], 1.8 + 0.2 * static_cast<double>(i % 4), 16000));
  }
  return out;
}

}  // namespace sraug::testing
