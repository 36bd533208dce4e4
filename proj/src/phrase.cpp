#include "syllaseg/phrase.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "syllaseg/errors.h"

namespace syllaseg {

Phrase parse_score(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("score: ") + e.what());
  }

  if (!doc.is_object() || !doc.contains("syllables") || !doc["syllables"].is_array()) {
    throw ParseError("score: expected an object with a \"syllables\" array");
  }

  Phrase phrase;
  phrase.phrase_id = doc.value("phrase_id", std::string{});

  const auto& syllables = doc["syllables"];
  if (syllables.empty()) {
    throw ParseError("score: syllable list is empty");
  }

  phrase.syllables.reserve(syllables.size());
  for (size_t i = 0; i < syllables.size(); ++i) {
    const auto& item = syllables[i];
    if (!item.is_object() || !item.contains("label") || !item.contains("duration_qn")) {
      throw ParseError("score: syllable at index " + std::to_string(i) +
                       " needs \"label\" and \"duration_qn\"");
    }
    if (!item["label"].is_string() || !item["duration_qn"].is_number()) {
      throw ParseError("score: bad field types at index " + std::to_string(i));
    }

    Syllable s;
    s.label = item["label"].get<std::string>();
    s.duration_qn = item["duration_qn"].get<double>();
    if (s.label.empty()) {
      throw ParseError("score: empty label at index " + std::to_string(i));
    }
    if (!std::isfinite(s.duration_qn) || s.duration_qn <= 0.0) {
      throw ParseError("score: non-positive duration at index " + std::to_string(i));
    }
    phrase.syllables.push_back(std::move(s));
  }
  return phrase;
}

Phrase load_score(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open score file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_score(buf.str());
}

}  // namespace syllaseg
