/// @file phrase.h
/// @brief Score parsing: syllable labels and relative durations of one phrase.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace syllaseg {

/// One syllable of a score: label plus its relative duration in quarter notes.
struct Syllable {
  std::string label;
  double duration_qn = 0.0;
};

/// Ordered syllables of one singing phrase. Tempo is discarded at parse time;
/// only the relative durations matter.
struct Phrase {
  std::string phrase_id;
  std::vector<Syllable> syllables;

  size_t size() const { return syllables.size(); }
};

/// Parses a score document of the form
///   {"phrase_id": "...", "syllables": [{"label": "...", "duration_qn": 1.0}, ...]}
/// Throws ParseError on malformed input, empty syllable lists, empty labels,
/// or non-positive durations (naming the offending syllable index).
Phrase parse_score(const std::string& json_text);

/// Reads a score JSON file and parses it.
Phrase load_score(const std::filesystem::path& path);

}  // namespace syllaseg
