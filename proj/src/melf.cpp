#include "sraug/melf.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "sraug/error.hpp"

namespace sraug {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw Error(ErrorCode::MalformedContainer, "truncated MELF header");
  }
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

}  // namespace

void write_melf(std::ostream& out, const MelSpectrogram& m) {
  out.write("MELF", 4);
  put_u32(out, kMelfVersion);
  put_u32(out, static_cast<std::uint32_t>(m.n_frames()));
  put_u32(out, static_cast<std::uint32_t>(m.n_bins()));
  put_u32(out, static_cast<std::uint32_t>(m.config.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(m.config.hop_size));
  for (Index t = 0; t < m.n_frames(); ++t) {
    for (Index b = 0; b < m.n_bins(); ++b) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m.logmels(t, b))));
    }
  }
  if (!out) throw Error(ErrorCode::IoFailure, "MELF write failed");
}

void write_melf(const std::filesystem::path& path, const MelSpectrogram& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  write_melf(out, m);
}

MelSpectrogram read_melf(std::istream& in, const SpectralConfig& base) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || std::memcmp(magic.data(), "MELF", 4) != 0) {
    throw Error(ErrorCode::MalformedContainer, "missing MELF magic");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kMelfVersion) {
    throw Error(ErrorCode::UnsupportedFormat, "MELF version " + std::to_string(version));
  }
  const std::uint32_t n_frames = get_u32(in);
  const std::uint32_t n_bins = get_u32(in);
  const std::uint32_t sample_rate = get_u32(in);
  const std::uint32_t hop = get_u32(in);
  if (n_bins == 0 || sample_rate == 0 || hop == 0) {
    throw Error(ErrorCode::MalformedContainer, "MELF header has zero bins, rate or hop");
  }

  SpectralConfig cfg = base;
  cfg.sample_rate = static_cast<int>(sample_rate);
  cfg.hop_size = static_cast<int>(hop);
  cfg.n_mels = static_cast<int>(n_bins);
  cfg.fmax = std::min(cfg.fmax, cfg.sample_rate / 2.0);
  if (cfg.win_size < cfg.hop_size) cfg.win_size = std::min(cfg.n_fft, cfg.hop_size * 4);

  RealMatrix logmels(n_frames, n_bins);
  std::vector<unsigned char> row(static_cast<std::size_t>(n_bins) * 4);
  for (std::uint32_t t = 0; t < n_frames; ++t) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()))) {
      throw Error(ErrorCode::MalformedContainer, "MELF payload shorter than header claims");
    }
    for (std::uint32_t b = 0; b < n_bins; ++b) {
      const unsigned char* p = row.data() + 4 * b;
      const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                                 static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
      const float v = std::bit_cast<float>(bits);
      if (!std::isfinite(v)) throw Error(ErrorCode::MalformedContainer, "non-finite MELF value");
      logmels(t, b) = v;
    }
  }
  return {std::move(logmels), cfg};
}

MelSpectrogram read_melf(const std::filesystem::path& path, const SpectralConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_melf(in, base);
}

}  // namespace sraug
