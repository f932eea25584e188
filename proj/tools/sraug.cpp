// sraug: spectrogram-resize augmentation and related measurements.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sraug/audio_io.hpp"
#include "sraug/melf.hpp"
#include "sraug/pipeline.hpp"
#include "sraug/pitch_eval.hpp"
#include "sraug/vc_losses.hpp"

namespace {

using namespace sraug;

PhaseInit parse_init(const std::string& s) {
  if (s == "zero") return PhaseInit::Zero;
  if (s == "random") return PhaseInit::Random;
  throw Error(ErrorCode::InvalidArgument, "--gl-init must be zero or random");
}

DiagGaussian read_gaussian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto log_std = j.at("log_std").get<std::vector<double>>();
    DiagGaussian g;
    g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Index>(mean.size()));
    g.log_std = Eigen::Map<const Eigen::VectorXd>(log_std.data(), static_cast<Index>(log_std.size()));
    if (!g.mean.allFinite() || !g.log_std.allFinite()) throw Error(ErrorCode::NonFinite, path);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedContainer, path + ": " + e.what());
  }
}

/// Fills options not given on the command line from `key = value` lines
/// whose keys are the long flag names without dashes.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    CLI::Option* opt = item.parents.empty() && item.name != "config" ? sub.get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr) throw Error(ErrorCode::InvalidArgument, path + ": unknown key '" + item.fullname() + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

Waveform load_at_rate(const std::string& path, int rate) {
  Waveform w = read_wav(path);
  return w.sample_rate() == rate ? w : resample(w, rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrogram-resize data augmentation toolkit"};
  app.require_subcommand(1);

  // augment
  PipelineConfig pc;
  std::string axis = "vertical";
  std::string gl_init = "zero";
  std::string vocoder_cmd;
  auto* augment = app.add_subcommand("augment", "Augment a WAV file or a directory tree of WAV files");
  std::string config_path;
  augment->add_option("--config", config_path, "key = value file mirroring the flags; flags win")
      ->check(CLI::ExistingFile);
  augment->add_option("--in", pc.input, "Input WAV file or directory (required here or in the config)");
  augment->add_option("--out", pc.output_dir, "Output directory (required here or in the config)");
  augment->add_option("--ratio-min", pc.ratio_range.lo, "Lower resize ratio")->capture_default_str();
  augment->add_option("--ratio-max", pc.ratio_range.hi, "Upper resize ratio")->capture_default_str();
  augment->add_option("--variants", pc.variants_per_file, "Augmented copies per input")->capture_default_str();
  augment->add_option("--axis", axis, "vertical or horizontal")->capture_default_str();
  augment->add_option("--seed", pc.master_seed, "Master seed")->capture_default_str();
  augment->add_option("--noise-std", pc.pad_noise_std, "Padding noise std (log-mel)")->capture_default_str();
  augment->add_option("--gl-iters", pc.gl.n_iters, "Griffin-Lim iterations")->capture_default_str();
  augment->add_option("--gl-init", gl_init, "Griffin-Lim phase init: zero or random")->capture_default_str();
  augment->add_option("--vocoder-cmd", vocoder_cmd, "External vocoder template with {mel} and {wav}");
  augment->add_option("--jobs", pc.jobs, "Worker threads")->capture_default_str();

  // mel
  std::string mel_in, mel_out;
  auto* mel = app.add_subcommand("mel", "WAV -> MELF log-mel spectrogram");
  mel->add_option("wav", mel_in)->required();
  mel->add_option("melf", mel_out)->required();

  // resize
  std::string rs_in, rs_out, rs_axis = "vertical";
  ResizeSpec rs;
  auto* resize = app.add_subcommand("resize", "Apply spectrogram resize to a MELF file");
  resize->add_option("in", rs_in)->required();
  resize->add_option("out", rs_out)->required();
  resize->add_option("--ratio", rs.ratio, "Resize ratio")->required();
  resize->add_option("--seed", rs.seed, "Seed for padding noise")->capture_default_str();
  resize->add_option("--axis", rs_axis, "vertical or horizontal")->capture_default_str();
  resize->add_option("--noise-std", rs.pad_noise_std, "Padding noise std")->capture_default_str();

  // reconstruct
  std::string rc_in, rc_out, rc_init = "zero";
  GriffinLimConfig rc_gl;
  auto* reconstruct = app.add_subcommand("reconstruct", "MELF -> WAV via Griffin-Lim");
  reconstruct->add_option("melf", rc_in)->required();
  reconstruct->add_option("wav", rc_out)->required();
  reconstruct->add_option("--gl-iters", rc_gl.n_iters)->capture_default_str();
  reconstruct->add_option("--gl-init", rc_init)->capture_default_str();
  reconstruct->add_option("--seed", rc_gl.seed)->capture_default_str();

  // f0
  std::string f0_in, f0_out;
  auto* f0 = app.add_subcommand("f0", "YIN F0 track to CSV");
  f0->add_option("wav", f0_in)->required();
  f0->add_option("csv", f0_out)->required();

  // f0pcc
  std::string pcc_a, pcc_b;
  auto* f0pcc = app.add_subcommand("f0pcc", "Pearson correlation of two F0 contours");
  f0pcc->add_option("wav_a", pcc_a)->required();
  f0pcc->add_option("wav_b", pcc_b)->required();

  // kl
  std::string kl_q, kl_p;
  auto* kl = app.add_subcommand("kl", "KL(q || p) of two diagonal Gaussians given as JSON {mean, log_std}");
  kl->add_option("q", kl_q)->required();
  kl->add_option("p", kl_p)->required();

  CLI11_PARSE(app, argc, argv);

  const SpectralConfig spectral;
  try {
    if (*augment) {
      if (!config_path.empty()) apply_config_file(*augment, config_path);
      if (pc.input.empty() || pc.output_dir.empty()) {
        throw Error(ErrorCode::InvalidArgument, "augment needs --in and --out, as flags or config keys");
      }
      pc.axis = parse_axis(axis);
      pc.gl.init = parse_init(gl_init);
      if (!vocoder_cmd.empty()) pc.vocoder_cmd = vocoder_cmd;
      const AugmentManifest m = run(pc);
      std::cerr << "augmented " << m.records.size() << " file(s), " << m.failures.size() << " failure(s)\n";
      for (const auto& f : m.failures) std::cerr << "  FAILED " << f.source_path << " [" << f.stage << "]: " << f.message << '\n';
      return m.ok() ? 0 : 1;
    }
    if (*mel) {
      write_melf(mel_out, mel_spectrogram(load_at_rate(mel_in, spectral.sample_rate), spectral));
    } else if (*resize) {
      rs.axis = parse_axis(rs_axis);
      write_melf(rs_out, apply_sr(read_melf(rs_in, spectral), rs));
    } else if (*reconstruct) {
      rc_gl.init = parse_init(rc_init);
      write_wav(rc_out, reconstruct_from_mel(read_melf(rc_in, spectral), rc_gl));
    } else if (*f0) {
      write_f0_csv(f0_out, yin_f0(read_wav(f0_in)));
    } else if (*f0pcc) {
      std::printf("%.6f\n", f0_pcc(read_wav(pcc_a), read_wav(pcc_b)));
    } else if (*kl) {
      std::printf("%.9f\n", kl_diag_gaussian(read_gaussian(kl_q), read_gaussian(kl_p)));
    }
  } catch (const std::exception& e) {
    std::cerr << "sraug: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
