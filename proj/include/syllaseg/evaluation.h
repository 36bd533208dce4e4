/// @file evaluation.h
/// @brief Boundary evaluation: tolerance rules, F-measure, deviation reports.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "syllaseg/decoder.h"

namespace syllaseg {

/// Manually annotated ground truth: L onsets plus the final offset.
struct ReferenceAnnotation {
  std::string phrase_id;
  std::vector<double> onsets_s;      // L+1 strictly increasing times
  std::vector<std::string> labels;   // L strings

  size_t syllable_count() const { return onsets_s.empty() ? 0 : onsets_s.size() - 1; }

  /// Throws ValidationError unless times strictly increase and the label
  /// count is one less than the time count.
  void validate() const;
};

struct EvalConfig {
  double tau_s = 0.05;           // onset tolerance, seconds
  double offset_fraction = 0.20; // offset tolerance as a fraction of the syllable duration
};

struct SyllableEval {
  bool onset_ok = false;
  bool offset_ok = false;
  bool label_ok = false;
  double onset_deviation_s = 0.0;  // signed, detected - reference

  bool correct() const { return onset_ok && offset_ok && label_ok; }
};

struct FalseOnset {
  size_t index = 0;          // syllable index of the out-of-tolerance onset
  double deviation_s = 0.0;  // signed
};

struct EvalReport {
  std::string phrase_id;
  std::vector<SyllableEval> per_syllable;
  size_t n_correct = 0;
  size_t n_detected = 0;
  size_t n_reference = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::vector<FalseOnset> false_onsets;
};

/// Scores a detected boundary sequence against the reference, index-wise.
/// A syllable is correct iff its onset deviation is within tau, its offset
/// deviation is within max(offset_fraction * reference duration, tau) and the
/// labels match. The offset of syllable i is the onset of syllable i+1 (the
/// last syllable uses the final time). Throws ValidationError when the
/// syllable counts differ.
EvalReport evaluate(const BoundarySequence& detected, const ReferenceAnnotation& reference,
                    const EvalConfig& cfg = {});

struct OnsetDeviation {
  size_t syllable_index = 0;
  double deviation_s = 0.0;  // signed, detected - reference
  bool within_tolerance = false;
};

/// Signed per-onset deviations with the tolerance flag at tau.
std::vector<OnsetDeviation> deviation_report(const BoundarySequence& detected,
                                             const ReferenceAnnotation& reference,
                                             const EvalConfig& cfg = {});

/// Micro-average: sums the counts across phrases and recomputes P/R/F.
/// Per-syllable entries and false onsets are concatenated in phrase order
/// (false-onset indices offset by the preceding syllable counts). Throws
/// ValidationError on an empty list.
EvalReport aggregate(const std::vector<EvalReport>& reports);

/// Human-readable table, one row per report: phrase, correct/total, P, R, F.
/// Appends a micro-averaged aggregate row when there is more than one report.
void print_report_table(std::ostream& out, const std::vector<EvalReport>& reports);

}  // namespace syllaseg
