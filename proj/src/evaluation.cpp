#include "syllaseg/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

void validate_times(const std::vector<double>& times, const std::string& what) {
  if (times.size() < 2) {
    throw ValidationError(what + " needs at least one syllable (2 times)");
  }
  for (size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ValidationError(what + " times must strictly increase (index " + std::to_string(i) +
                            ")");
    }
  }
}

void check_counts(const BoundarySequence& detected, const ReferenceAnnotation& reference) {
  validate_times(detected.onsets_s, "detected sequence");
  reference.validate();
  if (detected.syllable_count() != reference.syllable_count()) {
    throw ValidationError("syllable count mismatch: detected " +
                          std::to_string(detected.syllable_count()) + " vs reference " +
                          std::to_string(reference.syllable_count()));
  }
  if (!detected.labels.empty() && detected.labels.size() != detected.syllable_count()) {
    throw ValidationError("detected label count does not match the syllable count");
  }
}

void recompute_rates(EvalReport& report) {
  report.precision =
      report.n_detected > 0 ? static_cast<double>(report.n_correct) / report.n_detected : 0.0;
  report.recall =
      report.n_reference > 0 ? static_cast<double>(report.n_correct) / report.n_reference : 0.0;
  const double pr = report.precision + report.recall;
  report.f_measure = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
}

}  // namespace

void ReferenceAnnotation::validate() const {
  validate_times(onsets_s, "reference annotation");
  if (labels.size() + 1 != onsets_s.size()) {
    throw ValidationError("reference annotation needs one label per syllable (" +
                          std::to_string(onsets_s.size() - 1) + " syllables, " +
                          std::to_string(labels.size()) + " labels)");
  }
}

EvalReport evaluate(const BoundarySequence& detected, const ReferenceAnnotation& reference,
                    const EvalConfig& cfg) {
  if (!(cfg.tau_s > 0.0) || !(cfg.offset_fraction > 0.0) || !(cfg.offset_fraction < 1.0)) {
    throw ValidationError("bad evaluation config");
  }
  check_counts(detected, reference);

  const size_t count = reference.syllable_count();
  EvalReport report;
  report.phrase_id = reference.phrase_id;
  report.n_detected = count;
  report.n_reference = count;
  report.per_syllable.reserve(count);

  for (size_t i = 0; i < count; ++i) {
    SyllableEval eval;
    eval.onset_deviation_s = detected.onsets_s[i] - reference.onsets_s[i];
    eval.onset_ok = std::abs(eval.onset_deviation_s) <= cfg.tau_s;

    const double ref_duration = reference.onsets_s[i + 1] - reference.onsets_s[i];
    const double offset_tolerance = std::max(cfg.offset_fraction * ref_duration, cfg.tau_s);
    eval.offset_ok =
        std::abs(detected.onsets_s[i + 1] - reference.onsets_s[i + 1]) <= offset_tolerance;

    // Labels come from the same score in the decode pipeline; the check still
    // runs to catch wiring bugs. A detected sequence without labels passes.
    eval.label_ok = detected.labels.empty() || detected.labels[i] == reference.labels[i];

    if (eval.correct()) ++report.n_correct;
    if (!eval.onset_ok) report.false_onsets.push_back({i, eval.onset_deviation_s});
    report.per_syllable.push_back(eval);
  }

  recompute_rates(report);
  return report;
}

std::vector<OnsetDeviation> deviation_report(const BoundarySequence& detected,
                                             const ReferenceAnnotation& reference,
                                             const EvalConfig& cfg) {
  check_counts(detected, reference);

  std::vector<OnsetDeviation> deviations;
  deviations.reserve(reference.syllable_count());
  for (size_t i = 0; i < reference.syllable_count(); ++i) {
    OnsetDeviation d;
    d.syllable_index = i;
    d.deviation_s = detected.onsets_s[i] - reference.onsets_s[i];
    d.within_tolerance = std::abs(d.deviation_s) <= cfg.tau_s;
    deviations.push_back(d);
  }
  return deviations;
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) {
    throw ValidationError("nothing to aggregate");
  }

  EvalReport total;
  total.phrase_id = "aggregate";
  size_t offset = 0;
  for (const auto& report : reports) {
    total.n_correct += report.n_correct;
    total.n_detected += report.n_detected;
    total.n_reference += report.n_reference;
    total.per_syllable.insert(total.per_syllable.end(), report.per_syllable.begin(),
                              report.per_syllable.end());
    for (const auto& fo : report.false_onsets) {
      total.false_onsets.push_back({fo.index + offset, fo.deviation_s});
    }
    offset += report.per_syllable.size();
  }
  recompute_rates(total);
  return total;
}

void print_report_table(std::ostream& out, const std::vector<EvalReport>& reports) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %13s %7s %7s %7s\n", "phrase", "correct/total", "P",
                "R", "F");
  out << line;
  auto print_row = [&](const EvalReport& r) {
    const std::string ratio =
        std::to_string(r.n_correct) + "/" + std::to_string(r.n_reference);
    std::snprintf(line, sizeof(line), "%-24s %13s %7.3f %7.3f %7.3f\n",
                  r.phrase_id.empty() ? "(unnamed)" : r.phrase_id.c_str(), ratio.c_str(),
                  r.precision, r.recall, r.f_measure);
    out << line;
  };
  for (const auto& report : reports) print_row(report);
  if (reports.size() > 1) print_row(aggregate(reports));
}

}  // namespace syllaseg
