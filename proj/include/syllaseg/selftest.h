/// @file selftest.h
/// @brief Built-in oracle-equivalence and invariant suite.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "syllaseg/decoder.h"

namespace syllaseg {

/// One randomized decode instance: an ODF plus a matching duration model
/// whose means sum exactly to the ODF grid duration.
struct RandomDecodeInstance {
  OnsetDetectionFunction odf;
  DurationModel model;
};

struct InstanceParams {
  int n_min = 10;
  int n_max = 60;
  int l_min = 1;
  int l_max = 6;
  double gamma = kDefaultGamma;
  double odf_min = 0.01;
  double odf_max = 1.0;
  double hop_s = 0.01;
};

/// Draws (N, L) uniformly from the configured ranges, rejecting combinations
/// too large for the exhaustive oracle, then fills relative durations from
/// [0.5, 2] and ODF values from [odf_min, odf_max].
RandomDecodeInstance make_random_decode_instance(std::mt19937_64& rng,
                                                 const InstanceParams& params = {});

struct SelftestOptions {
  uint64_t seed = 1;
  double gamma = kDefaultGamma;
  double odf_floor = 1e-10;
  double prune_sigmas = 8.0;
  int instances = 200;
};

struct SelftestResult {
  int checks = 0;
  int failures = 0;
  std::vector<std::string> failure_messages;

  bool ok() const { return failures == 0; }
};

/// Runs the oracle-equivalence suite (viterbi vs exhaustive enumeration) and
/// the decoder invariant suite: endpoint pinning, monotonicity, path-score
/// self-consistency, optimality bound, observation-scaling invariance,
/// prior dominance on flat ODFs, pruning equivalence at opts.prune_sigmas and
/// the zero-ODF floor behavior. Progress lines go to log.
SelftestResult run_selftest(const SelftestOptions& opts, std::ostream& log);

}  // namespace syllaseg
