#include "syllaseg/boundary_io.h"

#include <unistd.h>

#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open file: " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<double> get_times(const nlohmann::json& doc, const std::filesystem::path& path) {
  if (!doc.contains("onsets_s") || !doc["onsets_s"].is_array()) {
    throw ParseError(path.string() + ": missing \"onsets_s\" array");
  }
  std::vector<double> times;
  for (const auto& v : doc["onsets_s"]) {
    if (!v.is_number()) throw ParseError(path.string() + ": non-numeric onset time");
    times.push_back(v.get<double>());
  }
  return times;
}

std::vector<std::string> get_labels(const nlohmann::json& doc) {
  std::vector<std::string> labels;
  if (doc.contains("labels") && doc["labels"].is_array()) {
    for (const auto& v : doc["labels"]) labels.push_back(v.get<std::string>());
  }
  return labels;
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["phrase_id"] = report.phrase_id;
  doc["n_correct"] = report.n_correct;
  doc["n_detected"] = report.n_detected;
  doc["n_reference"] = report.n_reference;
  doc["precision"] = report.precision;
  doc["recall"] = report.recall;
  doc["f_measure"] = report.f_measure;
  doc["per_syllable"] = nlohmann::json::array();
  for (const auto& s : report.per_syllable) {
    doc["per_syllable"].push_back({{"onset_ok", s.onset_ok},
                                   {"offset_ok", s.offset_ok},
                                   {"label_ok", s.label_ok},
                                   {"onset_deviation_s", s.onset_deviation_s}});
  }
  doc["false_onsets"] = nlohmann::json::array();
  for (const auto& f : report.false_onsets) {
    doc["false_onsets"].push_back({{"index", f.index}, {"deviation_s", f.deviation_s}});
  }
  return doc;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot write file: " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename " + tmp.string() + " to " + path.string());
  }
}

void save_boundaries(const BoundarySequence& seq, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["phrase_id"] = seq.phrase_id;
  doc["hop_s"] = seq.hop_s;
  doc["onsets_s"] = seq.onsets_s;
  doc["labels"] = seq.labels;
  doc["log_prob"] = seq.log_prob;
  write_file_atomic(path, doc.dump(2) + "\n");
}

BoundarySequence load_boundaries(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  BoundarySequence seq;
  seq.phrase_id = doc.value("phrase_id", std::string{});
  seq.hop_s = doc.value("hop_s", 0.01);
  seq.onsets_s = get_times(doc, path);
  seq.labels = get_labels(doc);
  seq.log_prob = doc.value("log_prob", 0.0);
  if (seq.onsets_s.size() < 2) {
    throw ParseError(path.string() + ": needs at least 2 boundary times");
  }
  return seq;
}

ReferenceAnnotation load_annotation(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  ReferenceAnnotation ann;
  ann.phrase_id = doc.value("phrase_id", std::string{});
  ann.onsets_s = get_times(doc, path);
  ann.labels = get_labels(doc);
  try {
    ann.validate();
  } catch (const ValidationError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return ann;
}

void save_annotation(const ReferenceAnnotation& ann, const std::filesystem::path& path) {
  ann.validate();
  nlohmann::json doc;
  doc["phrase_id"] = ann.phrase_id;
  doc["hop_s"] = 0.01;
  doc["onsets_s"] = ann.onsets_s;
  doc["labels"] = ann.labels;
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::string report_to_json(const EvalReport& report) { return report_json(report).dump(2) + "\n"; }

std::string reports_to_json(const std::vector<EvalReport>& phrases, const EvalReport& total) {
  nlohmann::json doc;
  doc["phrases"] = nlohmann::json::array();
  for (const auto& r : phrases) doc["phrases"].push_back(report_json(r));
  doc["aggregate"] = report_json(total);
  return doc.dump(2) + "\n";
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, report_to_json(report));
}

}  // namespace syllaseg
