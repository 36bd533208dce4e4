#include "syllaseg/selftest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result *= static_cast<double>(n - k + i) / i;
  return result;
}

struct Check {
  SelftestResult* result;
  std::ostream* log;

  void expect(bool ok, const std::string& what) {
    ++result->checks;
    if (!ok) {
      ++result->failures;
      result->failure_messages.push_back(what);
      (*log) << "  FAIL: " << what << "\n";
    }
  }
};

}  // namespace

RandomDecodeInstance make_random_decode_instance(std::mt19937_64& rng,
                                                 const InstanceParams& params) {
  std::uniform_int_distribution<int> n_dist(params.n_min, params.n_max);
  std::uniform_int_distribution<int> l_dist(params.l_min, params.l_max);

  int n = 0;
  int syllables = 0;
  do {  // keep instances small enough for the exhaustive oracle
    n = n_dist(rng);
    syllables = l_dist(rng);
  } while (binomial(n - 2, syllables - 1) > 1e6 || n < syllables + 1);

  std::uniform_real_distribution<double> qn_dist(0.5, 2.0);
  std::vector<double> relative(syllables);
  for (double& qn : relative) qn = qn_dist(rng);
  const double total = (n - 1) * params.hop_s;
  const double qn_sum = std::accumulate(relative.begin(), relative.end(), 0.0);

  std::vector<double> mus(syllables);
  for (int l = 0; l < syllables; ++l) mus[l] = total * relative[l] / qn_sum;

  RandomDecodeInstance instance;
  instance.model = build_duration_model(mus, params.gamma);
  instance.odf.hop_s = params.hop_s;
  instance.odf.values.resize(n);
  std::uniform_real_distribution<double> value_dist(params.odf_min, params.odf_max);
  for (double& v : instance.odf.values) v = value_dist(rng);
  return instance;
}

SelftestResult run_selftest(const SelftestOptions& opts, std::ostream& log) {
  SelftestResult result;
  Check check{&result, &log};
  std::mt19937_64 rng(opts.seed);

  InstanceParams params;
  params.gamma = opts.gamma;

  DecodeOptions decode_opts;
  decode_opts.odf_floor = opts.odf_floor;
  decode_opts.on_warning = [](const std::string&) {};

  log << "oracle equivalence: " << opts.instances << " random instances\n";
  for (int i = 0; i < opts.instances; ++i) {
    const RandomDecodeInstance instance = make_random_decode_instance(rng, params);
    const std::string tag = "instance " + std::to_string(i) + " (N=" +
                            std::to_string(instance.odf.size()) + ", L=" +
                            std::to_string(instance.model.size()) + ")";

    BoundarySequence fast;
    BoundarySequence oracle;
    try {
      fast = viterbi_decode(instance.odf, instance.model, decode_opts);
      oracle = brute_force_decode(instance.odf, instance.model, opts.odf_floor);
    } catch (const Error& e) {
      check.expect(false, tag + ": decode threw: " + e.what());
      continue;
    }

    check.expect(fast.state_indices == oracle.state_indices, tag + ": state indices differ");
    check.expect(std::abs(fast.log_prob - oracle.log_prob) <= 1e-9,
                 tag + ": log-probability differs");
    check.expect(fast.state_indices.front() == 1 &&
                     fast.state_indices.back() == static_cast<int>(instance.odf.size()),
                 tag + ": endpoints not pinned");
    check.expect(std::adjacent_find(fast.state_indices.begin(), fast.state_indices.end(),
                                    std::greater_equal<int>()) == fast.state_indices.end(),
                 tag + ": boundaries not strictly increasing");
    check.expect(std::abs(path_score(instance.odf, instance.model, fast.state_indices,
                                     opts.odf_floor) -
                          fast.log_prob) <= 1e-9,
                 tag + ": path_score disagrees with decode");

    // Optimality bound against one random valid monotone sequence.
    const int n = static_cast<int>(instance.odf.size());
    const int syllables = static_cast<int>(instance.model.size());
    std::vector<int> random_states{1};
    std::vector<int> interior(n - 2);
    std::iota(interior.begin(), interior.end(), 2);
    std::shuffle(interior.begin(), interior.end(), rng);
    interior.resize(syllables - 1);
    std::sort(interior.begin(), interior.end());
    random_states.insert(random_states.end(), interior.begin(), interior.end());
    random_states.push_back(n);
    check.expect(path_score(instance.odf, instance.model, random_states, opts.odf_floor) <=
                     fast.log_prob + 1e-12,
                 tag + ": a random path beats the decoded optimum");

    // Pruning equivalence at the configured band width.
    try {
      const BoundarySequence pruned =
          decode_with_pruning(instance.odf, instance.model, opts.prune_sigmas, decode_opts);
      check.expect(pruned.state_indices == fast.state_indices &&
                       pruned.log_prob == fast.log_prob,
                   tag + ": pruned decode differs at k=" + std::to_string(opts.prune_sigmas));
    } catch (const Error& e) {
      check.expect(false, tag + ": pruned decode threw: " + e.what());
    }
  }

  log << "observation scaling invariance\n";
  for (int i = 0; i < 25; ++i) {
    InstanceParams scaled = params;
    scaled.l_min = 2;
    const RandomDecodeInstance instance = make_random_decode_instance(rng, scaled);
    const BoundarySequence base = viterbi_decode(instance.odf, instance.model, decode_opts);

    constexpr double c = 0.25;
    OnsetDetectionFunction shrunk = instance.odf;
    for (double& v : shrunk.values) v *= c;
    const BoundarySequence scaled_seq = viterbi_decode(shrunk, instance.model, decode_opts);

    const double expected_shift = (static_cast<double>(instance.model.size()) - 1.0) * std::log(c);
    check.expect(scaled_seq.state_indices == base.state_indices,
                 "scaling changed the decoded states (instance " + std::to_string(i) + ")");
    check.expect(std::abs(scaled_seq.log_prob - base.log_prob - expected_shift) <= 1e-9,
                 "scaling shifted log-prob by the wrong amount (instance " + std::to_string(i) +
                     ")");
  }

  log << "prior dominance on flat ODFs\n";
  for (int i = 0; i < 25; ++i) {
    InstanceParams flat = params;
    flat.l_min = 2;
    flat.n_min = 40;
    RandomDecodeInstance instance = make_random_decode_instance(rng, flat);
    std::fill(instance.odf.values.begin(), instance.odf.values.end(), 0.5);
    const BoundarySequence seq = viterbi_decode(instance.odf, instance.model, decode_opts);

    double cumulative = 0.0;
    bool within = true;
    for (size_t l = 0; l + 1 < instance.model.size(); ++l) {
      cumulative += instance.model.entries[l].mu_s;
      if (std::abs(seq.onsets_s[l + 1] - cumulative) > instance.odf.hop_s + 1e-12) {
        within = false;
      }
    }
    check.expect(within, "flat-ODF boundaries drifted from the score positions (instance " +
                             std::to_string(i) + ")");
  }

  log << "observation floor behavior\n";
  {
    // An ODF that is zero everywhere the decoder looks: only the floor keeps
    // interior states reachable.
    OnsetDetectionFunction zero_odf;
    zero_odf.hop_s = 0.01;
    zero_odf.values.assign(40, 0.0);
    const double total = zero_odf.grid_duration_s();
    const DurationModel model = build_duration_model({total / 2.0, total / 2.0}, opts.gamma);
    try {
      const BoundarySequence seq = viterbi_decode(zero_odf, model, decode_opts);
      check.expect(std::isfinite(seq.log_prob),
                   "zero-ODF decode produced a non-finite log-probability");
    } catch (const Error& e) {
      check.expect(false, std::string("zero-valued ODF failed to decode with floor ") +
                              std::to_string(opts.odf_floor) + ": " + e.what());
    }
  }

  char summary[96];
  std::snprintf(summary, sizeof(summary), "selftest: %d checks, %d failures\n", result.checks,
                result.failures);
  log << summary;
  return result;
}

}  // namespace syllaseg
