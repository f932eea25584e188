#include "sraug/audio_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "sraug/error.hpp"

namespace sraug {

Waveform::Waveform(RealVector samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  }
  if (!samples_.allFinite()) {
    throw Error(ErrorCode::NonFinite, "waveform contains NaN or Inf");
  }
}

Waveform::Waveform(std::span<const double> samples, int sample_rate)
    : Waveform(RealVector(Eigen::Map<const RealVector>(samples.data(), static_cast<Index>(samples.size()))),
               sample_rate) {}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}
void put_tag(std::vector<unsigned char>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const FormatChunk& fmt) {
  if (fmt.format == kFormatFloat) {
    const std::uint32_t bits = le32(p);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return static_cast<double>(f);
  }
  if (fmt.bits == 16) {
    return static_cast<std::int16_t>(le16(p)) / 32768.0;
  }
  // 24-bit, sign-extended through the top byte.
  const std::int32_t v = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) << 8 |
                                                   static_cast<std::uint32_t>(p[1]) << 16 |
                                                   static_cast<std::uint32_t>(p[2]) << 24) >>
                         8;
  return v / 8388608.0;
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed for " + path.string());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::MalformedContainer, path.string() + " is not a RIFF/WAVE file");
  }

  std::optional<FormatChunk> fmt;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t size = le32(hdr + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || size > available) {
        throw Error(ErrorCode::MalformedContainer, "truncated fmt chunk in " + path.string());
      }
      const unsigned char* f = bytes.data() + body;
      FormatChunk c;
      c.format = le16(f);
      c.channels = le16(f + 2);
      c.sample_rate = le32(f + 4);
      c.block_align = le16(f + 12);
      c.bits = le16(f + 14);
      if (c.format == kFormatExtensible) {
        if (size < 40) throw Error(ErrorCode::MalformedContainer, "truncated extensible fmt chunk");
        c.format = le16(f + 24);  // first two bytes of the sub-format GUID
      }
      fmt = c;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      // Writers that stream sometimes leave the size at 0 or 0xFFFFFFFF.
      data_size = std::min<std::size_t>(size, available);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!fmt) throw Error(ErrorCode::MalformedContainer, "missing fmt chunk in " + path.string());
  if (!data) throw Error(ErrorCode::MalformedContainer, "missing data chunk in " + path.string());

  const bool pcm_ok = fmt->format == kFormatPcm && (fmt->bits == 16 || fmt->bits == 24);
  const bool float_ok = fmt->format == kFormatFloat && fmt->bits == 32;
  if (!pcm_ok && !float_ok) {
    throw Error(ErrorCode::UnsupportedFormat, "format code " + std::to_string(fmt->format) + " with " +
                                                  std::to_string(fmt->bits) + " bits in " + path.string());
  }
  if (fmt->channels != 1 && fmt->channels != 2) {
    throw Error(ErrorCode::UnsupportedFormat, std::to_string(fmt->channels) + " channels in " + path.string());
  }
  if (fmt->sample_rate == 0) throw Error(ErrorCode::MalformedContainer, "zero sample rate");
  const std::size_t bytes_per_sample = fmt->bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  if (fmt->block_align != frame_bytes) {
    throw Error(ErrorCode::MalformedContainer, "block_align disagrees with channels and bit depth");
  }

  const Index n = static_cast<Index>(data_size / frame_bytes);
  RealVector samples(n);
  for (Index i = 0; i < n; ++i) {
    const unsigned char* p = data + static_cast<std::size_t>(i) * frame_bytes;
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt->channels; ++c) acc += decode_sample(p + c * bytes_per_sample, *fmt);
    samples[i] = acc / fmt->channels;
  }
  if (!samples.allFinite()) throw Error(ErrorCode::MalformedContainer, "non-finite float samples");
  return Waveform(std::move(samples), static_cast<int>(fmt->sample_rate));
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  const auto n = static_cast<std::uint32_t>(w.size());
  const std::uint32_t data_bytes = n * 2;
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(w.sample_rate()));
  put32(out, static_cast<std::uint32_t>(w.sample_rate()) * 2);
  put16(out, 2);
  put16(out, 16);
  put_tag(out, "data");
  put32(out, data_bytes);
  for (Index i = 0; i < w.size(); ++i) {
    const double x = std::clamp(w.samples()[i], -1.0, 1.0) * 32768.0;
    const double q = std::clamp(std::round(x), -32768.0, 32767.0);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

namespace {

constexpr double kKaiserBeta = 12.0;
constexpr int kZeroCrossings = 64;

double kaiser(double x, double half_width) {
  const double t = x / half_width;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - t * t)) / std::cyl_bessel_i(0.0, kKaiserBeta);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw Error(ErrorCode::InvalidArgument, "target rate must be positive");
  const int source_rate = w.sample_rate();
  if (target_rate == source_rate) return w;

  const auto len = static_cast<std::int64_t>(w.size());
  const std::int64_t out_len = (len * target_rate + source_rate / 2) / source_rate;

  // Output n sits at input position n*M/L = q + phase/L, so the kernel only
  // ever needs L distinct fractional offsets.
  const std::int64_t g = std::gcd(source_rate, target_rate);
  const std::int64_t phases = target_rate / g;
  const std::int64_t step = source_rate / g;
  // Cutoff relative to the input Nyquist; downsampling narrows the passband.
  const double cutoff = std::min(1.0, static_cast<double>(target_rate) / source_rate);
  const double half_width = kZeroCrossings / cutoff;  // in input samples
  const std::int64_t reach = static_cast<std::int64_t>(std::floor(half_width)) + 1;
  const std::int64_t taps = 2 * reach + 1;

  auto tap = [&](double d) { return cutoff * sinc(cutoff * d) * kaiser(d, half_width); };
  const bool tabulate = phases * taps <= (std::int64_t{1} << 22);
  Eigen::MatrixXd table;
  if (tabulate) {
    table.resize(taps, phases);
    for (std::int64_t ph = 0; ph < phases; ++ph) {
      const double frac = static_cast<double>(ph) / static_cast<double>(phases);
      for (std::int64_t j = -reach; j <= reach; ++j) table(j + reach, ph) = tap(frac - static_cast<double>(j));
    }
  }

  const auto& x = w.samples();
  RealVector y(out_len);
  for (std::int64_t n = 0; n < out_len; ++n) {
    const std::int64_t num = n * step;
    const std::int64_t q = num / phases;
    const std::int64_t ph = num % phases;
    const double frac = static_cast<double>(ph) / static_cast<double>(phases);
    const std::int64_t j_lo = std::max(-reach, -q);
    const std::int64_t j_hi = std::min(reach, len - 1 - q);
    double acc = 0.0;
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      const double h = tabulate ? table(j + reach, ph) : tap(frac - static_cast<double>(j));
      acc += x[q + j] * h;
    }
    y[n] = acc;
  }
  return Waveform(std::move(y), target_rate);
}

}  // namespace sraug
