/// @file syllaseg_main.cpp
/// @brief Command-line front end: feature extraction, ODF synthesis, boundary
/// decoding, evaluation and the built-in self test.
///
/// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
/// assertion (including a failed self test).

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syllaseg/audio_io.h"
#include "syllaseg/boundary_io.h"
#include "syllaseg/decoder.h"
#include "syllaseg/duration_model.h"
#include "syllaseg/errors.h"
#include "syllaseg/evaluation.h"
#include "syllaseg/logmel.h"
#include "syllaseg/odf.h"
#include "syllaseg/phrase.h"
#include "syllaseg/selftest.h"

namespace fs = std::filesystem;
using namespace syllaseg;

namespace {

struct RunConfig {
  double gamma = kDefaultGamma;
  double tau_s = 0.05;
  double hop_s = 0.01;
  std::optional<double> prune_sigmas;
  double odf_floor = 1e-10;
  uint64_t seed = 0;
};

// Paired input files for directory (batch) mode: every <stem><ext> in dir
// must have a partner <stem><partner_ext> in partner_dir.
std::vector<std::pair<fs::path, fs::path>> pair_directory(const fs::path& dir,
                                                          const std::string& ext,
                                                          const fs::path& partner_dir,
                                                          const std::string& partner_ext) {
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      inputs.push_back(entry.path());
    }
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty()) {
    throw ValidationError("no " + ext + " files in " + dir.string());
  }

  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& input : inputs) {
    fs::path partner = partner_dir / input.filename();
    partner.replace_extension(partner_ext);
    if (!fs::exists(partner)) {
      throw ValidationError("no matching file for " + input.string() + " (expected " +
                            partner.string() + ")");
    }
    pairs.emplace_back(input, partner);
  }
  return pairs;
}

int run_features(const fs::path& audio_path, const fs::path& out_path) {
  const AudioBuffer audio = read_wav_mono(audio_path);
  const LogMelSpectrogram spec =
      standardize(logmel_spectrogram(audio.samples, audio.sample_rate));
  save_logmel_csv(spec, out_path);
  std::cout << audio_path.string() << ": " << spec.num_frames << " frames x "
            << LogMelSpectrogram::kBands << " bands -> " << out_path.string() << "\n";
  return 0;
}

BoundarySequence decode_one(const fs::path& odf_path, const fs::path& score_path,
                            const RunConfig& cfg, bool no_smooth,
                            double audio_duration_override) {
  OnsetDetectionFunction odf = load_odf(odf_path);
  if (!no_smooth) odf = smooth_odf(odf);

  const Phrase phrase = load_score(score_path);
  const double duration =
      audio_duration_override > 0.0 ? audio_duration_override : odf.grid_duration_s();
  const DurationModel model =
      build_duration_model(absolute_durations(phrase, duration), cfg.gamma);

  DecodeOptions opts;
  opts.odf_floor = cfg.odf_floor;
  opts.prune_sigmas = cfg.prune_sigmas;

  BoundarySequence seq = viterbi_decode(odf, model, opts);
  seq.phrase_id = phrase.phrase_id;
  seq.labels.reserve(phrase.size());
  for (const auto& syllable : phrase.syllables) seq.labels.push_back(syllable.label);
  return seq;
}

int run_decode(const fs::path& odf_path, const fs::path& score_path, const fs::path& out_path,
               const RunConfig& cfg, bool no_smooth, double audio_duration_override) {
  if (fs::is_directory(odf_path)) {
    if (!fs::is_directory(score_path)) {
      throw ValidationError("batch decode needs a score directory to pair with " +
                            odf_path.string());
    }
    fs::create_directories(out_path);
    const auto pairs = pair_directory(odf_path, ".csv", score_path, ".json");
    for (const auto& [odf_file, score_file] : pairs) {
      fs::path out = out_path / odf_file.filename();
      out.replace_extension(".json");
      const BoundarySequence seq =
          decode_one(odf_file, score_file, cfg, no_smooth, audio_duration_override);
      save_boundaries(seq, out);
      std::cout << odf_file.filename().string() << ": " << seq.syllable_count()
                << " syllables, log_prob " << seq.log_prob << "\n";
    }
    return 0;
  }

  const BoundarySequence seq =
      decode_one(odf_path, score_path, cfg, no_smooth, audio_duration_override);
  save_boundaries(seq, out_path);
  std::cout << seq.phrase_id << ": " << seq.syllable_count() << " syllables, log_prob "
            << seq.log_prob << " -> " << out_path.string() << "\n";
  return 0;
}

int run_eval(const fs::path& detected_path, const fs::path& reference_path,
             const fs::path& out_path, const RunConfig& cfg) {
  EvalConfig eval_cfg;
  eval_cfg.tau_s = cfg.tau_s;

  if (fs::is_directory(detected_path)) {
    if (!fs::is_directory(reference_path)) {
      throw ValidationError("batch eval needs a reference directory to pair with " +
                            detected_path.string());
    }
    const auto pairs = pair_directory(detected_path, ".json", reference_path, ".json");
    std::vector<EvalReport> reports;
    for (const auto& [detected_file, reference_file] : pairs) {
      reports.push_back(evaluate(load_boundaries(detected_file),
                                 load_annotation(reference_file), eval_cfg));
    }
    print_report_table(std::cout, reports);
    if (!out_path.empty()) {
      write_file_atomic(out_path, reports_to_json(reports, aggregate(reports)));
    }
    return 0;
  }

  const EvalReport report =
      evaluate(load_boundaries(detected_path), load_annotation(reference_path), eval_cfg);
  print_report_table(std::cout, {report});
  if (!out_path.empty()) {
    save_report(report, out_path);
  }
  return 0;
}

int run_synth(const fs::path& annotation_path, const fs::path& out_path, const RunConfig& cfg,
              const SynthOptions& synth_opts) {
  const ReferenceAnnotation annotation = load_annotation(annotation_path);

  // The last annotated time is the final offset; bumps go on the onsets only.
  std::vector<double> onsets(annotation.onsets_s.begin(), annotation.onsets_s.end() - 1);
  const double total_duration = annotation.onsets_s.back();

  const OnsetDetectionFunction odf = synth_odf(onsets, total_duration, cfg.hop_s, synth_opts);
  save_odf(odf, out_path);
  std::cout << annotation.phrase_id << ": " << odf.size() << " frames -> " << out_path.string()
            << "\n";
  return 0;
}

int run_selftest_cmd(const RunConfig& cfg, int instances) {
  SelftestOptions opts;
  opts.seed = cfg.seed != 0 ? cfg.seed : 1;
  opts.gamma = cfg.gamma;
  opts.odf_floor = cfg.odf_floor;
  opts.prune_sigmas = cfg.prune_sigmas.value_or(8.0);
  opts.instances = instances;

  const SelftestResult result = run_selftest(opts, std::cout);
  return result.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score-informed syllable boundary decoding for singing phrases"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file (flags and env override it)");

  RunConfig cfg;
  app.add_option("--gamma", cfg.gamma, "Duration prior std-to-mean ratio")
      ->envname("SYLLASEG_GAMMA")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tau,--tau_s", cfg.tau_s, "Onset tolerance in seconds")
      ->envname("SYLLASEG_TAU_S")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--hop,--hop_s", cfg.hop_s, "Frame hop in seconds (synthesis grid)")
      ->envname("SYLLASEG_HOP_S")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--prune-sigmas,--prune_sigmas", cfg.prune_sigmas,
                 "Restrict decode transitions to mu +/- k*sigma")
      ->envname("SYLLASEG_PRUNE_SIGMAS");
  app.add_option("--odf-floor,--odf_floor", cfg.odf_floor,
                 "Observation probability floor before the log")
      ->envname("SYLLASEG_ODF_FLOOR")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed for synthesis and self test")
      ->envname("SYLLASEG_SEED")
      ->capture_default_str();

  auto* features = app.add_subcommand("features", "Extract a standardized log-mel CSV from WAV");
  fs::path features_audio, features_out;
  features->add_option("audio", features_audio, "Mono 44.1 kHz WAV file")->required();
  features->add_option("--out", features_out, "Output CSV path")->required();
  features->fallthrough();

  auto* decode = app.add_subcommand("decode", "Decode syllable boundaries from an ODF + score");
  fs::path decode_odf, decode_score, decode_out;
  bool no_smooth = false;
  double audio_duration_override = 0.0;
  decode->add_option("odf", decode_odf, "ODF CSV file, or a directory of them")->required();
  decode->add_option("score", decode_score, "Score JSON file, or a directory of them")
      ->required();
  decode->add_option("--out", decode_out, "Output boundary JSON path (directory in batch mode)")
      ->required();
  decode->add_flag("--no-smooth", no_smooth, "Skip the 5-frame Hann smoothing");
  decode->add_option("--audio-duration", audio_duration_override,
                     "Normalize score durations to this many seconds instead of the ODF grid");
  decode->fallthrough();

  auto* eval = app.add_subcommand("eval", "Score detected boundaries against a reference");
  fs::path eval_detected, eval_reference, eval_out;
  eval->add_option("detected", eval_detected, "Boundary JSON file, or a directory of them")
      ->required();
  eval->add_option("reference", eval_reference, "Annotation JSON file, or a directory of them")
      ->required();
  eval->add_option("--out", eval_out, "Optional report JSON path");
  eval->fallthrough();

  auto* synth = app.add_subcommand("synth", "Synthesize an ODF from an annotation");
  fs::path synth_annotation, synth_out;
  SynthOptions synth_opts;
  synth->add_option("annotation", synth_annotation, "Annotation JSON file")->required();
  synth->add_option("--out", synth_out, "Output ODF CSV path")->required();
  synth->add_option("--distractors", synth_opts.distractor_count,
                    "Number of distractor bumps")
      ->capture_default_str();
  synth->add_option("--distractor-amp-min", synth_opts.distractor_amp_min,
                    "Distractor amplitude range, lower end")
      ->capture_default_str();
  synth->add_option("--distractor-amp-max", synth_opts.distractor_amp_max,
                    "Distractor amplitude range, upper end")
      ->capture_default_str();
  synth->add_option("--noise-floor", synth_opts.noise_floor, "Uniform noise amplitude")
      ->capture_default_str();
  synth->fallthrough();

  auto* selftest = app.add_subcommand("selftest", "Run the oracle-equivalence and invariant suite");
  int selftest_instances = 200;
  selftest->add_option("--instances", selftest_instances, "Randomized oracle instances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  selftest->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0; any usage problem exits 1
  }

  try {
    if (features->parsed()) return run_features(features_audio, features_out);
    if (decode->parsed())
      return run_decode(decode_odf, decode_score, decode_out, cfg, no_smooth,
                        audio_duration_override);
    if (eval->parsed()) return run_eval(eval_detected, eval_reference, eval_out, cfg);
    if (synth->parsed()) {
      synth_opts.seed = cfg.seed;
      return run_synth(synth_annotation, synth_out, cfg, synth_opts);
    }
    if (selftest->parsed()) return run_selftest_cmd(cfg, selftest_instances);
  } catch (const syllaseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
