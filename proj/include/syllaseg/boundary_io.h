/// @file boundary_io.h
/// @brief JSON I/O for boundary sequences, annotations and eval reports.

#pragma once

#include <filesystem>
#include <vector>

#include "syllaseg/decoder.h"
#include "syllaseg/evaluation.h"

namespace syllaseg {

/// Boundary JSON:
///   {"phrase_id": "...", "hop_s": 0.01, "onsets_s": [...], "labels": [...],
///    "log_prob": <number>}
void save_boundaries(const BoundarySequence& seq, const std::filesystem::path& path);
BoundarySequence load_boundaries(const std::filesystem::path& path);

/// Reference annotation JSON: the boundary shape minus log_prob.
ReferenceAnnotation load_annotation(const std::filesystem::path& path);
void save_annotation(const ReferenceAnnotation& ann, const std::filesystem::path& path);

/// Serializes one report (or an aggregate plus its per-phrase reports) to JSON.
std::string report_to_json(const EvalReport& report);
std::string reports_to_json(const std::vector<EvalReport>& phrases, const EvalReport& total);
void save_report(const EvalReport& report, const std::filesystem::path& path);

/// Writes content to path via a temporary file and an atomic rename, so
/// concurrent runs never observe partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace syllaseg
