#include "syllaseg/duration_model.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "syllaseg/errors.h"

namespace syllaseg {

std::vector<double> absolute_durations(const Phrase& phrase, double audio_duration_s) {
  if (!(audio_duration_s > 0.0)) {
    throw ValidationError("audio duration must be positive, got " +
                          std::to_string(audio_duration_s));
  }
  if (phrase.syllables.empty()) {
    throw ValidationError("phrase has no syllables");
  }

  double total_qn = 0.0;
  for (size_t i = 0; i < phrase.syllables.size(); ++i) {
    const double qn = phrase.syllables[i].duration_qn;
    if (!(qn > 0.0)) {
      throw ValidationError("non-positive duration at index " + std::to_string(i));
    }
    total_qn += qn;
  }

  std::vector<double> mus;
  mus.reserve(phrase.syllables.size());
  for (const auto& syllable : phrase.syllables) {
    mus.push_back(audio_duration_s * syllable.duration_qn / total_qn);
  }
  return mus;
}

DurationModel build_duration_model(const std::vector<double>& mus_s, double gamma) {
  if (!(gamma > 0.0)) {
    throw ValidationError("gamma must be positive, got " + std::to_string(gamma));
  }
  if (mus_s.empty()) {
    throw ValidationError("no syllable durations given");
  }

  DurationModel model;
  model.gamma = gamma;
  model.entries.reserve(mus_s.size());
  for (size_t i = 0; i < mus_s.size(); ++i) {
    if (!(mus_s[i] > 0.0)) {
      throw ValidationError("non-positive mean duration at index " + std::to_string(i));
    }
    model.entries.push_back({mus_s[i], gamma * mus_s[i]});
  }
  return model;
}

double prior_log_density(const DurationModel& model, size_t syllable_index, double duration_s) {
  if (syllable_index >= model.entries.size()) {
    throw ValidationError("syllable index " + std::to_string(syllable_index) +
                          " out of range (model has " + std::to_string(model.entries.size()) +
                          " entries)");
  }
  if (!std::isfinite(duration_s)) {
    throw ValidationError("duration must be finite");
  }

  const auto& entry = model.entries[syllable_index];
  const double z = (duration_s - entry.mu_s) / entry.sigma_s;
  return -std::log(std::sqrt(2.0 * std::numbers::pi) * entry.sigma_s) - 0.5 * z * z;
}

}  // namespace syllaseg
