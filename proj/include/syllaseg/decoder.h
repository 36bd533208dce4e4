/// @file decoder.h
/// @brief Score-informed Viterbi decoding of syllable boundary sequences.
///
/// The hidden state space is the set of candidate onset positions S_1..S_N,
/// one per ODF frame (state S_i sits at time (i-1) * hop_s). Transition
/// probabilities come from the per-syllable Gaussian duration priors applied
/// to the time distance between states; observation probabilities come from
/// the ODF value at the target state. The first boundary is pinned to S_1 and
/// the last to S_N, so a phrase with L syllables decodes to L+1 boundary
/// times. Interior boundaries live strictly between the endpoints, on states
/// S_2..S_{N-1}.
///
/// Conventions: states are 1-based (S_1..S_N) to match the onset grid;
/// syllables are 0-based everywhere in this API. Observation log
/// probabilities are consumed by interior boundaries only; the pinned
/// endpoints contribute no observation term.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "syllaseg/duration_model.h"
#include "syllaseg/odf.h"

namespace syllaseg {

/// Candidate onset positions discretized by the hop size.
struct StateGrid {
  int n_states = 0;  // N, one state per ODF frame
  double hop_s = 0.01;

  /// Time of state S_i, i in 1..N.
  double state_time(int state) const { return (state - 1) * hop_s; }

  /// Time distance between states S_i and S_j (j > i).
  double distance(int from, int to) const { return (to - from) * hop_s; }
};

/// Dynamic-programming tables of one decode: per interior level l (1..L-1),
/// the best path log-probability delta reaching each state and the argmax
/// predecessor psi. Unreachable states carry -infinity.
struct ViterbiTrellis {
  int n_levels = 0;  // L-1 interior boundary levels
  int n_states = 0;
  std::vector<double> delta;  // n_levels x n_states, state S_i at column i-1
  std::vector<int32_t> psi;

  double delta_at(int level, int state) const {
    return delta[static_cast<size_t>(level) * n_states + (state - 1)];
  }
  int32_t psi_at(int level, int state) const {
    return psi[static_cast<size_t>(level) * n_states + (state - 1)];
  }
};

/// Decoded boundary sequence: L+1 strictly increasing onset times with the
/// first at 0 and the last at (N-1) * hop_s, plus the path log-probability.
struct BoundarySequence {
  std::string phrase_id;
  double hop_s = 0.01;
  std::vector<double> onsets_s;     // L+1 times, onset of each syllable + final offset
  std::vector<int> state_indices;   // matching states, 1-based; first=1, last=N
  double log_prob = 0.0;
  std::vector<std::string> labels;  // L labels copied from the score, may be empty

  size_t syllable_count() const { return onsets_s.empty() ? 0 : onsets_s.size() - 1; }
};

struct DecodeStats {
  long long transitions_evaluated = 0;
  double elapsed_s = 0.0;
};

struct DecodeOptions {
  /// When set, transitions for syllable l are restricted to durations within
  /// mu_l +/- k * sigma_l. Unset decodes the exact global optimum.
  std::optional<double> prune_sigmas;

  /// Observation probabilities are floored at this value before the log, so
  /// exact zeros in the ODF never turn into -infinity.
  double odf_floor = 1e-10;

  /// Receives non-fatal diagnostics (duration-sum mismatch). Defaults to
  /// writing on stderr.
  std::function<void(const std::string&)> on_warning;
};

/// Decodes the most likely boundary sequence for the given ODF and duration
/// model. Requires N >= L+1 and the model durations summing to the ODF grid
/// duration (warns beyond 2% relative mismatch, errors beyond 20%). Ties in
/// every argmax resolve to the smallest state index. Throws InfeasibleError
/// when no feasible monotone path exists.
BoundarySequence viterbi_decode(const OnsetDetectionFunction& odf, const DurationModel& model,
                                const DecodeOptions& opts = {}, DecodeStats* stats = nullptr,
                                ViterbiTrellis* trellis = nullptr);

/// Exhaustive oracle: enumerates every strictly increasing assignment of the
/// interior boundaries to S_2..S_{N-1} and returns the best-scoring sequence
/// under the same tie-break rule as viterbi_decode (smallest state indices,
/// resolved from the last boundary backwards). Throws ValidationError when
/// the instance exceeds 10^6 candidate sequences.
BoundarySequence brute_force_decode(const OnsetDetectionFunction& odf, const DurationModel& model,
                                    double odf_floor = 1e-10);

/// Log-probability of one explicit boundary sequence: the sum of the duration
/// prior over consecutive boundary distances plus the observation log
/// probabilities of the interior boundaries. state_indices must be strictly
/// increasing, start at 1, end at N and have length L+1.
double path_score(const OnsetDetectionFunction& odf, const DurationModel& model,
                  const std::vector<int>& state_indices, double odf_floor = 1e-10);

/// viterbi_decode restricted to the transition band mu_l +/- k * sigma_l.
/// Identical output contract; with a generous band (k >= 6 in practice) the
/// result reproduces the unpruned decode. Throws InfeasibleError when the
/// band admits no feasible path, never falling back silently.
BoundarySequence decode_with_pruning(const OnsetDetectionFunction& odf,
                                     const DurationModel& model,
                                     double band_halfwidth_sigmas,
                                     const DecodeOptions& opts = {},
                                     DecodeStats* stats = nullptr);

}  // namespace syllaseg
