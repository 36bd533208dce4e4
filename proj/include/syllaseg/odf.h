/// @file odf.h
/// @brief Onset detection functions: I/O, smoothing, synthesis, peak picking.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace syllaseg {

/// Uniformly sampled per-frame onset probabilities in [0, 1].
struct OnsetDetectionFunction {
  std::vector<double> values;
  double hop_s = 0.01;

  size_t size() const { return values.size(); }

  /// Time spanned by the frame grid, (size - 1) * hop_s.
  double grid_duration_s() const;

  /// Throws ValidationError unless all values are finite and in [0, 1],
  /// hop_s > 0 and there are at least two frames.
  void validate() const;
};

/// Smooths the ODF with a 5-frame Hann window normalized to unit sum,
/// effectively the kernel [0, 0.25, 0.5, 0.25, 0]. Output has the same
/// length (edges zero-padded) and is clipped to [0, 1]. Throws
/// ValidationError for inputs shorter than 5 frames.
OnsetDetectionFunction smooth_odf(const OnsetDetectionFunction& odf);

/// Reads an ODF CSV file: first line `# hop_s=<decimal>`, then one value per
/// line. Errors name the offending line.
OnsetDetectionFunction load_odf(const std::filesystem::path& path);

/// Writes the ODF CSV format; round-trips values within 1e-9 and hop exactly.
void save_odf(const OnsetDetectionFunction& odf, const std::filesystem::path& path);

/// Controls for synth_odf. Distractor bumps are placed uniformly at random,
/// at least 100 ms away from every true onset, inside distractor_region when
/// set (whole phrase otherwise).
struct SynthOptions {
  int distractor_count = 0;
  double distractor_amp_min = 0.3;
  double distractor_amp_max = 0.9;
  double noise_floor = 0.0;
  uint64_t seed = 0;
  std::optional<std::pair<double, double>> distractor_region;
};

/// Synthesizes an ODF with a Gaussian bump (std 15 ms, amplitude drawn from
/// [0.6, 1.0]) at every true onset, plus distractor bumps and uniform noise
/// in [0, noise_floor], clipped to [0, 1]. Deterministic for a fixed seed.
/// Throws ValidationError when onsets are unordered or out of range.
OnsetDetectionFunction synth_odf(const std::vector<double>& true_onsets_s,
                                 double total_duration_s, double hop_s,
                                 const SynthOptions& opts);

/// Baseline onset selection: local maxima above threshold, greedily enforcing
/// the minimum separation (the higher peak wins a conflict). Returns onset
/// times in seconds, strictly increasing.
std::vector<double> peak_pick(const OnsetDetectionFunction& odf, double threshold,
                              double min_separation_s);

}  // namespace syllaseg
