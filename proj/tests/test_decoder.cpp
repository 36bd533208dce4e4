#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "syllaseg/decoder.h"
#include "syllaseg/errors.h"
#include "syllaseg/selftest.h"

using namespace syllaseg;

namespace {

OnsetDetectionFunction make_odf(std::vector<double> values, double hop = 0.01) {
  OnsetDetectionFunction odf;
  odf.values = std::move(values);
  odf.hop_s = hop;
  return odf;
}

DecodeOptions quiet_opts() {
  DecodeOptions opts;
  opts.on_warning = [](const std::string&) {};
  return opts;
}

// Four states one second apart, two syllables of nominal length 1 and 2
// seconds. The interior boundary has exactly two candidates.
struct MicroInstance {
  OnsetDetectionFunction odf = make_odf({0.9, 0.5, 0.5, 0.9}, 1.0);
  DurationModel model = build_duration_model({1.0, 2.0}, 0.35);
};

}  // namespace

TEST_CASE("micro instance decodes the hand-enumerated optimum") {
  MicroInstance micro;
  const BoundarySequence seq = viterbi_decode(micro.odf, micro.model);

  CHECK(seq.state_indices == std::vector<int>{1, 2, 4});
  CHECK(seq.onsets_s == std::vector<double>{0.0, 1.0, 3.0});
  CHECK(seq.log_prob == doctest::Approx(-1.1245271785318804).epsilon(1e-12));

  // The losing candidate, scored explicitly.
  CHECK(path_score(micro.odf, micro.model, {1, 3, 4}) ==
        doctest::Approx(-6.226567994858412).epsilon(1e-12));

  const BoundarySequence oracle = brute_force_decode(micro.odf, micro.model);
  CHECK(oracle.state_indices == seq.state_indices);
  CHECK(oracle.log_prob == doctest::Approx(seq.log_prob).epsilon(1e-12));
}

TEST_CASE("single-syllable phrases have no free boundary") {
  const auto odf = make_odf({0.2, 0.9, 0.1, 0.7, 0.2, 0.4});
  const DurationModel model = build_duration_model({odf.grid_duration_s()}, 0.35);

  const BoundarySequence seq = viterbi_decode(odf, model);
  CHECK(seq.state_indices == std::vector<int>{1, 6});
  CHECK(seq.onsets_s.front() == 0.0);
  CHECK(seq.onsets_s.back() == doctest::Approx(0.05));
  CHECK(seq.log_prob ==
        doctest::Approx(prior_log_density(model, 0, odf.grid_duration_s())).epsilon(1e-12));

  const BoundarySequence oracle = brute_force_decode(odf, model);
  CHECK(oracle.state_indices == seq.state_indices);
  CHECK(oracle.log_prob == seq.log_prob);
}

TEST_CASE("viterbi matches the exhaustive oracle on random instances") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 50; ++i) {
    const RandomDecodeInstance instance = make_random_decode_instance(rng);
    const BoundarySequence fast = viterbi_decode(instance.odf, instance.model, quiet_opts());
    const BoundarySequence oracle = brute_force_decode(instance.odf, instance.model);

    REQUIRE(fast.state_indices == oracle.state_indices);
    CHECK(std::abs(fast.log_prob - oracle.log_prob) <= 1e-9);

    CHECK(fast.state_indices.front() == 1);
    CHECK(fast.state_indices.back() == static_cast<int>(instance.odf.size()));
    for (size_t k = 1; k < fast.state_indices.size(); ++k) {
      CHECK(fast.state_indices[k] > fast.state_indices[k - 1]);
    }
    CHECK(std::abs(path_score(instance.odf, instance.model, fast.state_indices) -
                   fast.log_prob) <= 1e-9);
  }
}

TEST_CASE("any valid monotone sequence scores at most the decoded optimum") {
  std::mt19937_64 rng(77);
  const RandomDecodeInstance instance = make_random_decode_instance(rng);
  const BoundarySequence best = viterbi_decode(instance.odf, instance.model, quiet_opts());

  const int n = static_cast<int>(instance.odf.size());
  const int interior = static_cast<int>(instance.model.size()) - 1;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> pool(n - 2);
    std::iota(pool.begin(), pool.end(), 2);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(interior);
    std::sort(pool.begin(), pool.end());

    std::vector<int> states{1};
    states.insert(states.end(), pool.begin(), pool.end());
    states.push_back(n);
    CHECK(path_score(instance.odf, instance.model, states) <= best.log_prob + 1e-12);
  }
}

TEST_CASE("scaling the ODF shifts log-prob by (L-1) log c and keeps the argmax") {
  std::mt19937_64 rng(31);
  InstanceParams params;
  params.l_min = 2;
  for (int i = 0; i < 10; ++i) {
    const RandomDecodeInstance instance = make_random_decode_instance(rng, params);
    const BoundarySequence base = viterbi_decode(instance.odf, instance.model, quiet_opts());

    const double c = 0.25;
    OnsetDetectionFunction scaled = instance.odf;
    for (double& v : scaled.values) v *= c;
    const BoundarySequence shifted = viterbi_decode(scaled, instance.model, quiet_opts());

    CHECK(shifted.state_indices == base.state_indices);
    const double expected = (static_cast<double>(instance.model.size()) - 1.0) * std::log(c);
    CHECK(std::abs(shifted.log_prob - base.log_prob - expected) <= 1e-9);
  }
}

TEST_CASE("flat ODFs reduce the decode to the duration prior") {
  std::mt19937_64 rng(12);
  InstanceParams params;
  params.l_min = 2;
  params.n_min = 50;
  for (int i = 0; i < 10; ++i) {
    RandomDecodeInstance instance = make_random_decode_instance(rng, params);
    std::fill(instance.odf.values.begin(), instance.odf.values.end(), 0.7);
    const BoundarySequence seq = viterbi_decode(instance.odf, instance.model, quiet_opts());

    double cumulative = 0.0;
    for (size_t l = 0; l + 1 < instance.model.size(); ++l) {
      cumulative += instance.model.entries[l].mu_s;
      CHECK(std::abs(seq.onsets_s[l + 1] - cumulative) <= instance.odf.hop_s + 1e-12);
    }
  }
}

TEST_CASE("exact ties resolve to the smallest state index") {
  // Symmetric two-syllable instance: both interior candidates score
  // identically, so the earlier state must win in both decoders.
  const auto odf = make_odf({0.5, 0.5, 0.5, 0.5}, 1.0);
  const DurationModel model = build_duration_model({1.5, 1.5}, 0.35);

  const BoundarySequence fast = viterbi_decode(odf, model);
  const BoundarySequence oracle = brute_force_decode(odf, model);
  CHECK(fast.state_indices == std::vector<int>{1, 2, 4});
  CHECK(oracle.state_indices == std::vector<int>{1, 2, 4});
}

TEST_CASE("endpoint observations are never consumed") {
  MicroInstance micro;
  const BoundarySequence base = viterbi_decode(micro.odf, micro.model);

  OnsetDetectionFunction edited = micro.odf;
  edited.values.front() = 0.001;
  edited.values.back() = 0.001;
  const BoundarySequence same = viterbi_decode(edited, micro.model);
  CHECK(same.state_indices == base.state_indices);
  CHECK(same.log_prob == base.log_prob);
}

TEST_CASE("infeasible and degenerate inputs are rejected") {
  const auto odf = make_odf({0.5, 0.5, 0.5, 0.5, 0.5});

  // More syllables than interior states can host.
  const DurationModel too_many = build_duration_model(
      std::vector<double>(5, odf.grid_duration_s() / 5.0), 0.35);
  CHECK_THROWS_AS(viterbi_decode(odf, too_many, quiet_opts()), InfeasibleError);

  CHECK_THROWS_AS(viterbi_decode(odf, DurationModel{}, quiet_opts()), ValidationError);
}

TEST_CASE("duration-sum mismatch warns at 2% and errors at 20%") {
  const auto odf = make_odf(std::vector<double>(101, 0.5));  // grid spans 1.0 s

  std::vector<std::string> warnings;
  DecodeOptions opts;
  opts.on_warning = [&](const std::string& msg) { warnings.push_back(msg); };

  const DurationModel exact = build_duration_model({0.5, 0.5}, 0.35);
  viterbi_decode(odf, exact, opts);
  CHECK(warnings.empty());

  const DurationModel drifted = build_duration_model({0.55, 0.55}, 0.35);  // 10% high
  viterbi_decode(odf, drifted, opts);
  REQUIRE(warnings.size() == 1);

  const DurationModel broken = build_duration_model({0.65, 0.65}, 0.35);  // 30% high
  try {
    viterbi_decode(odf, broken, opts);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("20%") != std::string::npos);
  }
}

TEST_CASE("path_score rejects malformed sequences") {
  MicroInstance micro;
  CHECK_THROWS_AS(path_score(micro.odf, micro.model, {1, 4}), ValidationError);
  CHECK_THROWS_AS(path_score(micro.odf, micro.model, {2, 3, 4}), ValidationError);
  CHECK_THROWS_AS(path_score(micro.odf, micro.model, {1, 3, 3}), ValidationError);
  CHECK_THROWS_AS(path_score(micro.odf, micro.model, {1, 3, 5}), ValidationError);
}

TEST_CASE("the oracle refuses combinatorially large instances") {
  const auto odf = make_odf(std::vector<double>(60, 0.5));
  const DurationModel model = build_duration_model(
      std::vector<double>(6, odf.grid_duration_s() / 6.0), 0.35);
  CHECK_THROWS_AS(brute_force_decode(odf, model), ValidationError);
}

TEST_CASE("pruned decode reproduces the unpruned result at generous bands") {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 20; ++i) {
    const RandomDecodeInstance instance = make_random_decode_instance(rng);
    const BoundarySequence base = viterbi_decode(instance.odf, instance.model, quiet_opts());
    const BoundarySequence pruned =
        decode_with_pruning(instance.odf, instance.model, 8.0, quiet_opts());
    CHECK(pruned.state_indices == base.state_indices);
    CHECK(pruned.log_prob == base.log_prob);
  }
}

TEST_CASE("a band covering every transition reproduces the trellis bitwise") {
  std::mt19937_64 rng(405);
  const RandomDecodeInstance instance = make_random_decode_instance(rng);

  ViterbiTrellis full;
  ViterbiTrellis banded;
  const BoundarySequence base =
      viterbi_decode(instance.odf, instance.model, quiet_opts(), nullptr, &full);

  DecodeOptions wide = quiet_opts();
  // Wide enough that every frame distance 1..N-1 falls inside every band.
  wide.prune_sigmas = 1e6;
  const BoundarySequence same =
      viterbi_decode(instance.odf, instance.model, wide, nullptr, &banded);

  CHECK(same.state_indices == base.state_indices);
  CHECK(same.log_prob == base.log_prob);
  CHECK(full.delta == banded.delta);
  CHECK(full.psi == banded.psi);
}

TEST_CASE("an over-tight band fails loudly instead of falling back") {
  // The first syllable is far shorter than one frame, so its 1-sigma band
  // contains no representable duration: the grid forces a performance more
  // than 3 sigma from the score.
  const auto odf = make_odf(std::vector<double>(101, 0.5));
  const DurationModel model = build_duration_model({0.004, 0.996}, 0.35);

  DecodeOptions warn_free = quiet_opts();
  CHECK_NOTHROW(viterbi_decode(odf, model, warn_free));
  CHECK_THROWS_AS(decode_with_pruning(odf, model, 1.0, warn_free), InfeasibleError);

  CHECK_THROWS_AS(decode_with_pruning(odf, model, 0.5, warn_free), ValidationError);
}

TEST_CASE("decode stats report the pruning savings") {
  std::mt19937_64 rng(406);
  InstanceParams params;
  params.n_min = 50;
  params.n_max = 60;
  params.l_min = 3;
  const RandomDecodeInstance instance = make_random_decode_instance(rng, params);

  DecodeStats full_stats;
  DecodeStats pruned_stats;
  viterbi_decode(instance.odf, instance.model, quiet_opts(), &full_stats);
  decode_with_pruning(instance.odf, instance.model, 8.0, quiet_opts(), &pruned_stats);

  CHECK(full_stats.transitions_evaluated > 0);
  CHECK(pruned_stats.transitions_evaluated > 0);
  CHECK(pruned_stats.transitions_evaluated <= full_stats.transitions_evaluated);
}
