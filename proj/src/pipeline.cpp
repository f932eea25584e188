#include "sraug/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "sraug/audio_io.hpp"
#include "sraug/random.hpp"

namespace sraug {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  ratio_range.validate();
  spectral.validate();
  gl.validate();
  if (variants_per_file < 1) throw Error(ErrorCode::InvalidArgument, "variants_per_file must be >= 1");
  if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 1");
  if (!std::isfinite(pad_noise_std) || pad_noise_std < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "pad_noise_std must be finite and >= 0");
  }
  if (output_dir.empty()) throw Error(ErrorCode::InvalidArgument, "output directory is required");
  const fs::path input_dir = fs::is_directory(input) ? input : input.parent_path();
  std::error_code ec;
  if (fs::weakly_canonical(input_dir, ec) == fs::weakly_canonical(output_dir, ec)) {
    throw Error(ErrorCode::InvalidArgument, "output directory must differ from the input directory");
  }
}

std::string output_file_name(const std::string& stem, double ratio, int variant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_sr%.3f_%d.wav", ratio, variant);
  return stem + buf;
}

namespace {

template <typename F>
auto stage(const std::string& path, const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const AugmentError&) {
    throw;
  } catch (const Error& e) {
    throw AugmentError(e.code(), path, name, e.what());
  } catch (const std::exception& e) {
    throw AugmentError(ErrorCode::IoFailure, path, name, e.what());
  }
}

}  // namespace

std::vector<AugmentRecord> augment_file(const fs::path& path, const PipelineConfig& cfg, std::uint64_t item_index,
                                        const fs::path& relative_source) {
  const fs::path rel = relative_source.empty() ? path.filename() : relative_source;
  const std::string source = rel.generic_string();

  const Waveform original = stage(source, "read", [&] { return read_wav(path); });
  const Waveform audio = stage(source, "resample", [&] { return resample(original, cfg.spectral.sample_rate); });
  const MelSpectrogram mel = stage(source, "mel", [&] { return mel_spectrogram(audio, cfg.spectral); });

  std::vector<AugmentRecord> records;
  for (int v = 0; v < cfg.variants_per_file; ++v) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, item_index, static_cast<std::uint64_t>(v));
    Rng rng(seed);
    const double ratio = sample_ratio(cfg.ratio_range, rng);
    const ResizeSpec spec{ratio, cfg.axis, cfg.pad_noise_std, seed};

    const MelSpectrogram resized = stage(source, "resize", [&] {
      return cfg.axis == Axis::Vertical ? vertical_sr(mel, spec, rng) : horizontal_sr(mel, spec);
    });
    const Waveform out = stage(source, "vocoder", [&] {
      if (cfg.vocoder_cmd) return external_vocoder(resized, *cfg.vocoder_cmd);
      GriffinLimConfig gl = cfg.gl;
      gl.seed = seed;
      return reconstruct_from_mel(resized, gl);
    });

    const fs::path out_rel = rel.parent_path() / output_file_name(rel.stem().string(), ratio, v);
    stage(source, "write", [&] {
      const fs::path target = cfg.output_dir / out_rel;
      fs::create_directories(target.parent_path());
      write_wav(target, out);
    });

    AugmentRecord rec;
    rec.source_path = source;
    rec.output_path = out_rel.generic_string();
    rec.ratio = ratio;
    rec.axis = cfg.axis;
    rec.seed = seed;
    rec.n_frames_in = mel.n_frames();
    rec.n_frames_out = resized.n_frames();
    rec.duration_sec_in = original.duration_sec();
    rec.duration_sec_out = out.duration_sec();
    rec.variant = v;
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

bool has_wav_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".wav";
}

bool is_within(const fs::path& p, const fs::path& dir) {
  std::error_code ec;
  const fs::path a = fs::weakly_canonical(p, ec);
  const fs::path b = fs::weakly_canonical(dir, ec);
  auto [end_b, end_a] = std::mismatch(b.begin(), b.end(), a.begin(), a.end());
  return end_b == b.end();
}

}  // namespace

std::vector<fs::path> discover_wavs(const fs::path& input) {
  if (!fs::exists(input)) throw Error(ErrorCode::IoFailure, "input " + input.string() + " does not exist");
  std::vector<fs::path> files;
  if (fs::is_regular_file(input)) {
    if (has_wav_extension(input)) files.push_back(input);
    return files;
  }
  for (const auto& entry : fs::recursive_directory_iterator(input, fs::directory_options::skip_permission_denied)) {
    if (entry.is_regular_file() && has_wav_extension(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

AugmentManifest run(const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<fs::path> files = discover_wavs(cfg.input);
  // Earlier outputs nested inside the corpus must not be fed back in.
  std::erase_if(files, [&](const fs::path& p) { return is_within(p, cfg.output_dir); });
  if (files.empty()) throw Error(ErrorCode::EmptyCorpus, "no .wav files under " + cfg.input.string());
  fs::create_directories(cfg.output_dir);

  const bool single_file = fs::is_regular_file(cfg.input);
  struct Outcome {
    std::vector<AugmentRecord> records;
    std::optional<ItemFailure> failure;
  };
  std::vector<Outcome> outcomes(files.size());

  auto process = [&](std::size_t i) {
    const fs::path rel = single_file ? files[i].filename() : files[i].lexically_relative(cfg.input);
    try {
      outcomes[i].records = augment_file(files[i], cfg, i, rel);
    } catch (const AugmentError& e) {
      outcomes[i].failure = ItemFailure{e.path(), e.stage(), e.what()};
    } catch (const std::exception& e) {
      outcomes[i].failure = ItemFailure{rel.generic_string(), "unknown", e.what()};
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), files.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) process(i);
      });
    }
  }

  AugmentManifest manifest;
  for (auto& o : outcomes) {
    std::move(o.records.begin(), o.records.end(), std::back_inserter(manifest.records));
    if (o.failure) manifest.failures.push_back(std::move(*o.failure));
  }
  std::stable_sort(manifest.records.begin(), manifest.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source_path, a.variant) < std::tie(b.source_path, b.variant);
  });

  std::ofstream out(cfg.output_dir / "manifest.jsonl", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write manifest in " + cfg.output_dir.string());
  write_manifest(out, manifest.records);
  return manifest;
}

void write_manifest(std::ostream& out, const std::vector<AugmentRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["source_path"] = r.source_path;
    j["output_path"] = r.output_path;
    j["ratio"] = r.ratio;
    j["axis"] = to_string(r.axis);
    j["seed"] = r.seed;
    j["n_frames_in"] = r.n_frames_in;
    j["n_frames_out"] = r.n_frames_out;
    j["duration_sec_in"] = r.duration_sec_in;
    j["duration_sec_out"] = r.duration_sec_out;
    out << j.dump() << '\n';
  }
}

std::vector<AugmentRecord> read_manifest(std::istream& in) {
  std::vector<AugmentRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AugmentRecord r;
      r.source_path = j.at("source_path").get<std::string>();
      r.output_path = j.at("output_path").get<std::string>();
      r.ratio = j.at("ratio").get<double>();
      r.axis = parse_axis(j.at("axis").get<std::string>());
      r.seed = j.at("seed").get<std::uint64_t>();
      r.n_frames_in = j.at("n_frames_in").get<std::int64_t>();
      r.n_frames_out = j.at("n_frames_out").get<std::int64_t>();
      r.duration_sec_in = j.at("duration_sec_in").get<double>();
      r.duration_sec_out = j.at("duration_sec_out").get<double>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedContainer, std::string("manifest line: ") + e.what());
    }
  }
  return records;
}

}  // namespace sraug
