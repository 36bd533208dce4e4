/// @file duration_model.h
/// @brief Per-syllable Gaussian duration priors derived from the score.

#pragma once

#include <vector>

#include "syllaseg/phrase.h"

namespace syllaseg {

/// Ratio between a syllable's duration std-dev and its mean duration.
inline constexpr double kDefaultGamma = 0.35;

/// Gaussian prior parameters of one syllable's duration, in seconds.
struct DurationEntry {
  double mu_s = 0.0;
  double sigma_s = 0.0;
};

/// Ordered per-syllable duration priors with sigma = gamma * mu.
struct DurationModel {
  std::vector<DurationEntry> entries;
  double gamma = kDefaultGamma;

  size_t size() const { return entries.size(); }
};

/// Converts the phrase's relative durations to absolute seconds by scaling
/// them so they sum to audio_duration_s. Throws ValidationError on a
/// non-positive duration.
std::vector<double> absolute_durations(const Phrase& phrase, double audio_duration_s);

/// Builds the duration model from absolute syllable durations. Every sigma is
/// gamma * mu. Throws ValidationError on non-positive mu or gamma.
DurationModel build_duration_model(const std::vector<double>& mus_s, double gamma = kDefaultGamma);

/// Log density of the Gaussian duration prior of the given syllable,
/// evaluated at duration_s. Computed directly in log space:
///   -log(sqrt(2*pi) * sigma) - (d - mu)^2 / (2 * sigma^2)
/// so far-tail durations never underflow. syllable_index is 0-based; throws
/// ValidationError when it is out of range or duration_s is not finite.
double prior_log_density(const DurationModel& model, size_t syllable_index, double duration_s);

}  // namespace syllaseg
