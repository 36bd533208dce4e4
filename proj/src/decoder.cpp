#include "syllaseg/decoder.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kWarnMismatch = 0.02;
constexpr double kErrorMismatch = 0.20;
constexpr double kOracleCap = 1e6;

void emit_warning(const DecodeOptions& opts, const std::string& message) {
  if (opts.on_warning) {
    opts.on_warning(message);
  } else {
    std::fprintf(stderr, "warning: %s\n", message.c_str());
  }
}

// Validates shared preconditions and the soft duration-sum guard. Returns the
// grid duration (N-1) * hop.
double check_inputs(const OnsetDetectionFunction& odf, const DurationModel& model,
                    const DecodeOptions& opts) {
  odf.validate();
  const int n = static_cast<int>(odf.values.size());
  const int syllables = static_cast<int>(model.entries.size());
  if (syllables == 0) {
    throw ValidationError("duration model is empty");
  }
  if (n < syllables + 1) {
    throw InfeasibleError("no feasible monotone path: ODF has " + std::to_string(n) +
                          " frames but the score needs at least " +
                          std::to_string(syllables + 1));
  }

  const double grid_duration = odf.grid_duration_s();
  double mu_sum = 0.0;
  for (const auto& entry : model.entries) mu_sum += entry.mu_s;
  const double mismatch = std::abs(mu_sum - grid_duration) / grid_duration;
  if (mismatch > kErrorMismatch) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "score duration %.3f s deviates %.0f%% from the audio grid %.3f s, "
                  "beyond the 20%% limit",
                  mu_sum, mismatch * 100.0, grid_duration);
    throw ValidationError(buf);
  }
  if (mismatch > kWarnMismatch) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "score duration %.3f s deviates %.1f%% from the audio grid %.3f s",
                  mu_sum, mismatch * 100.0, grid_duration);
    emit_warning(opts, buf);
  }
  return grid_duration;
}

// Inclusive frame-distance band for syllable l's transitions.
struct FrameBand {
  int lo = 1;
  int hi = 0;
};

FrameBand transition_band(const DurationModel& model, size_t syllable, double hop_s,
                          int max_distance, const std::optional<double>& prune_sigmas) {
  FrameBand band{1, max_distance};
  if (prune_sigmas) {
    const auto& entry = model.entries[syllable];
    const double k = *prune_sigmas;
    const double lo_s = entry.mu_s - k * entry.sigma_s;
    const double hi_s = entry.mu_s + k * entry.sigma_s;
    band.lo = std::max(1, static_cast<int>(std::ceil(lo_s / hop_s - 1e-9)));
    band.hi = std::min(max_distance, static_cast<int>(std::floor(hi_s / hop_s + 1e-9)));
    if (band.lo > band.hi) {
      throw InfeasibleError("pruning band of " + std::to_string(k) +
                            " sigmas admits no transition for syllable " +
                            std::to_string(syllable));
    }
  }
  return band;
}

BoundarySequence make_sequence(const std::vector<int>& states, double hop_s, double log_prob) {
  BoundarySequence seq;
  seq.hop_s = hop_s;
  seq.state_indices = states;
  seq.log_prob = log_prob;
  seq.onsets_s.reserve(states.size());
  for (int s : states) seq.onsets_s.push_back((s - 1) * hop_s);
  return seq;
}

// Prefers the path whose boundaries, read from the last interior one
// backwards, are smaller -- the order Viterbi's smallest-index argmax yields.
bool reverse_lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

double binomial_or_cap(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) {
    result *= static_cast<double>(n - k + i) / i;
    if (result > 10.0 * kOracleCap) return result;  // enough to fail the cap
  }
  return result;
}

}  // namespace

BoundarySequence viterbi_decode(const OnsetDetectionFunction& odf, const DurationModel& model,
                                const DecodeOptions& opts, DecodeStats* stats,
                                ViterbiTrellis* trellis) {
  check_inputs(odf, model, opts);
  const auto started = std::chrono::steady_clock::now();

  const int n = static_cast<int>(odf.values.size());
  const int syllable_count = static_cast<int>(model.entries.size());
  const double hop = odf.hop_s;
  long long transitions = 0;

  // Observation log-probs per 1-based state; endpoints never consume one.
  std::vector<double> obs(n + 1, 0.0);
  for (int s = 2; s <= n - 1; ++s) {
    obs[s] = std::log(std::max(odf.values[s - 1], opts.odf_floor));
  }

  // Per-syllable transition scores at integer frame distances, computed via
  // prior_log_density so path_score sums the exact same terms.
  std::vector<std::vector<double>> trans(syllable_count);
  for (int l = 0; l < syllable_count; ++l) {
    trans[l].assign(n, kNegInf);
    for (int d = 1; d <= n - 1; ++d) {
      trans[l][d] = prior_log_density(model, l, d * hop);
    }
  }

  std::vector<FrameBand> bands(syllable_count);
  for (int l = 0; l < syllable_count; ++l) {
    bands[l] = transition_band(model, l, hop, n - 1, opts.prune_sigmas);
  }

  auto finish = [&](const std::vector<int>& states, double log_prob,
                    std::vector<std::vector<double>>&& delta,
                    std::vector<std::vector<int32_t>>&& psi) {
    if (stats) {
      stats->transitions_evaluated = transitions;
      stats->elapsed_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    if (trellis) {
      trellis->n_levels = static_cast<int>(delta.size());
      trellis->n_states = n;
      trellis->delta.clear();
      trellis->psi.clear();
      trellis->delta.reserve(delta.size() * n);
      trellis->psi.reserve(psi.size() * n);
      for (const auto& row : delta) trellis->delta.insert(trellis->delta.end(), row.begin(), row.end());
      for (const auto& row : psi) trellis->psi.insert(trellis->psi.end(), row.begin(), row.end());
    }
    return make_sequence(states, hop, log_prob);
  };

  if (syllable_count == 1) {
    // Both boundaries are pinned; the only term is the whole-phrase prior.
    const int d = n - 1;
    if (d < bands[0].lo || d > bands[0].hi) {
      throw InfeasibleError("pruning band excludes the single-syllable span");
    }
    ++transitions;
    return finish({1, n}, trans[0][d], {}, {});
  }

  const int levels = syllable_count - 1;  // interior boundaries q_1..q_{L-1}
  std::vector<std::vector<double>> delta(levels, std::vector<double>(n, kNegInf));
  std::vector<std::vector<int32_t>> psi(levels, std::vector<int32_t>(n, 0));

  // Level 1: transition from the pinned q_0 = S_1.
  {
    const FrameBand band = bands[0];
    const int lo = std::max(2, 1 + band.lo);
    const int hi = std::min(n - 1, 1 + band.hi);
    for (int i = lo; i <= hi; ++i) {
      ++transitions;
      delta[0][i - 1] = trans[0][i - 1] + obs[i];
      psi[0][i - 1] = 1;
    }
  }

  // Levels 2..L-1.
  for (int level = 1; level < levels; ++level) {
    const FrameBand band = bands[level];
    const std::vector<double>& prev = delta[level - 1];
    const double* trans_row = trans[level].data();
    for (int j = 3; j <= n - 1; ++j) {
      const int lo = std::max(2, j - band.hi);
      const int hi = j - band.lo;
      double best = kNegInf;
      int32_t arg = 0;
      for (int i = lo; i <= hi; ++i) {
        ++transitions;
        const double cand = prev[i - 1] + trans_row[j - i];
        if (cand > best) {
          best = cand;
          arg = i;
        }
      }
      if (arg != 0) {
        delta[level][j - 1] = best + obs[j];
        psi[level][j - 1] = arg;
      }
    }
  }

  // Termination: transition into the pinned q_L = S_N.
  double best = kNegInf;
  int32_t best_state = 0;
  {
    const FrameBand band = bands[syllable_count - 1];
    const std::vector<double>& last = delta[levels - 1];
    const double* trans_row = trans[syllable_count - 1].data();
    const int lo = std::max(2, n - band.hi);
    const int hi = std::min(n - 1, n - band.lo);
    for (int i = lo; i <= hi; ++i) {
      ++transitions;
      const double cand = last[i - 1] + trans_row[n - i];
      if (cand > best) {
        best = cand;
        best_state = i;
      }
    }
  }
  if (best_state == 0 || !std::isfinite(best)) {
    if (opts.prune_sigmas) {
      throw InfeasibleError("no feasible path within the pruning band of " +
                            std::to_string(*opts.prune_sigmas) + " sigmas");
    }
    throw InfeasibleError("no feasible boundary path (all candidate paths have zero probability)");
  }

  std::vector<int> states(static_cast<size_t>(syllable_count) + 1);
  states[0] = 1;
  states[syllable_count] = n;
  states[syllable_count - 1] = best_state;
  for (int level = levels - 1; level >= 1; --level) {
    states[level] = psi[level][states[level + 1] - 1];
  }

  return finish(states, best, std::move(delta), std::move(psi));
}

double path_score(const OnsetDetectionFunction& odf, const DurationModel& model,
                  const std::vector<int>& state_indices, double odf_floor) {
  odf.validate();
  const int n = static_cast<int>(odf.values.size());
  const size_t syllable_count = model.entries.size();
  if (state_indices.size() != syllable_count + 1) {
    throw ValidationError("boundary sequence needs " + std::to_string(syllable_count + 1) +
                          " states, got " + std::to_string(state_indices.size()));
  }
  if (state_indices.front() != 1 || state_indices.back() != n) {
    throw ValidationError("boundary sequence must start at S_1 and end at S_N");
  }
  for (size_t i = 1; i < state_indices.size(); ++i) {
    if (state_indices[i] <= state_indices[i - 1] || state_indices[i] > n) {
      throw ValidationError("boundary states must strictly increase within 1..N");
    }
  }

  double score = 0.0;
  for (size_t l = 0; l < syllable_count; ++l) {
    const double d = (state_indices[l + 1] - state_indices[l]) * odf.hop_s;
    score += prior_log_density(model, l, d);
    if (l + 1 < syllable_count) {
      score += std::log(std::max(odf.values[state_indices[l + 1] - 1], odf_floor));
    }
  }
  return score;
}

BoundarySequence brute_force_decode(const OnsetDetectionFunction& odf, const DurationModel& model,
                                    double odf_floor) {
  DecodeOptions opts;
  opts.odf_floor = odf_floor;
  check_inputs(odf, model, opts);

  const int n = static_cast<int>(odf.values.size());
  const int syllable_count = static_cast<int>(model.entries.size());
  const double hop = odf.hop_s;

  const double combinations = binomial_or_cap(n - 2, syllable_count - 1);
  if (combinations > kOracleCap) {
    throw ValidationError("instance too large for the exhaustive oracle (" +
                          std::to_string(combinations) + " candidate paths)");
  }

  if (syllable_count == 1) {
    std::vector<int> states{1, n};
    return make_sequence(states, hop, path_score(odf, model, states, odf_floor));
  }

  std::vector<int> states(static_cast<size_t>(syllable_count) + 1);
  states[0] = 1;
  states[syllable_count] = n;

  std::vector<int> best_states;
  double best_score = kNegInf;

  // Depth-first enumeration of the interior boundaries with an incrementally
  // accumulated prefix score, summed in the same level order as the trellis.
  auto enumerate = [&](auto&& self, int level, double prefix) -> void {
    // Interior boundaries still to place after this one.
    const int remaining = syllable_count - 2 - level;
    for (int s = states[level] + 1; s <= n - 1 - remaining; ++s) {
      states[level + 1] = s;
      const double d = (s - states[level]) * hop;
      const double extended = prefix + prior_log_density(model, level, d) +
                              std::log(std::max(odf.values[s - 1], odf_floor));
      if (level + 1 == syllable_count - 1) {
        const double total =
            extended + prior_log_density(model, syllable_count - 1, (n - s) * hop);
        if (total > best_score ||
            (total == best_score && reverse_lex_less(states, best_states))) {
          best_score = total;
          best_states = states;
        }
      } else {
        self(self, level + 1, extended);
      }
    }
  };
  enumerate(enumerate, 0, 0.0);

  if (best_states.empty()) {
    throw InfeasibleError("no feasible boundary path");
  }
  return make_sequence(best_states, hop, best_score);
}

BoundarySequence decode_with_pruning(const OnsetDetectionFunction& odf,
                                     const DurationModel& model, double band_halfwidth_sigmas,
                                     const DecodeOptions& opts, DecodeStats* stats) {
  if (!(band_halfwidth_sigmas >= 1.0)) {
    throw ValidationError("pruning band half-width must be at least 1 sigma");
  }
  DecodeOptions pruned = opts;
  pruned.prune_sigmas = band_halfwidth_sigmas;
  return viterbi_decode(odf, model, pruned, stats);
}

}  // namespace syllaseg
