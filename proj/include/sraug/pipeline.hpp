#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sraug/error.hpp"
#include "sraug/spectral.hpp"
#include "sraug/sr_ops.hpp"
#include "sraug/vocoder.hpp"

namespace sraug {

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir;
  RatioRange ratio_range;
  int variants_per_file = 1;
  Axis axis = Axis::Vertical;
  std::uint64_t master_seed = 0;
  SpectralConfig spectral;
  GriffinLimConfig gl;
  std::optional<std::string> vocoder_cmd;
  double pad_noise_std = 0.1;
  int jobs = 1;

  void validate() const;
};

/// One emitted file. Paths are relative: source_path to the input root (or
/// the file name when the input is a single file), output_path to output_dir.
struct AugmentRecord {
  std::string source_path;
  std::string output_path;
  double ratio = 1.0;
  Axis axis = Axis::Vertical;
  std::uint64_t seed = 0;
  std::int64_t n_frames_in = 0;
  std::int64_t n_frames_out = 0;
  double duration_sec_in = 0.0;
  double duration_sec_out = 0.0;
  int variant = 0;
};

/// A stage failure inside augment_file, tagged with the file and stage.
class AugmentError : public Error {
 public:
  AugmentError(ErrorCode code, std::string path, std::string stage, const std::string& message)
      : Error(code, path + " [" + stage + "]: " + message), path_(std::move(path)), stage_(std::move(stage)) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string path_;
  std::string stage_;
};

struct ItemFailure {
  std::string source_path;
  std::string stage;
  std::string message;
};

struct AugmentManifest {
  std::vector<AugmentRecord> records;
  std::vector<ItemFailure> failures;

  bool ok() const noexcept { return failures.empty(); }
};

/// "<stem>_sr<ratio with 3 decimals>_<variant>.wav"
std::string output_file_name(const std::string& stem, double ratio, int variant);

/// Read, resample, mel, then per variant: derive seed, draw ratio, resize,
/// reconstruct and write. `relative_source` is the path recorded in the
/// manifest and mirrored under output_dir. Errors carry the stage name and
/// path.
std::vector<AugmentRecord> augment_file(const std::filesystem::path& path, const PipelineConfig& cfg,
                                        std::uint64_t item_index,
                                        const std::filesystem::path& relative_source = {});

/// Recursively collects *.wav (case-insensitive), lexicographically sorted.
std::vector<std::filesystem::path> discover_wavs(const std::filesystem::path& input);

/// Processes the whole corpus and writes output_dir/manifest.jsonl. A failing
/// file is recorded in `failures` and does not stop the batch. Throws
/// EmptyCorpus when no WAV file is found.
AugmentManifest run(const PipelineConfig& cfg);

void write_manifest(std::ostream& out, const std::vector<AugmentRecord>& records);
std::vector<AugmentRecord> read_manifest(std::istream& in);

}  // namespace sraug
