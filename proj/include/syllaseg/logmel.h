/// @file logmel.h
/// @brief Log-mel spectrogram extraction matching the decoder's frame grid.

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace syllaseg {

/// Log-mel band energies, one row of 80 bands per 10 ms frame.
struct LogMelSpectrogram {
  static constexpr size_t kBands = 80;

  std::vector<double> data;  // row-major, num_frames x kBands
  size_t num_frames = 0;
  double hop_s = 0.01;

  double at(size_t frame, size_t band) const { return data[frame * kBands + band]; }
  double& at(size_t frame, size_t band) { return data[frame * kBands + band]; }
};

/// Computes the log-mel spectrogram of 44.1 kHz mono audio: 25 ms analysis
/// window (1102 samples, zero-padded to 2048), 10 ms hop, 80 triangular mel
/// filters spanning 0–11000 Hz, log of the floored band power. Frame count is
/// floor((num_samples - window) / hop) + 1. Throws ValidationError on other
/// sample rates or audio shorter than one window.
LogMelSpectrogram logmel_spectrogram(std::span<const double> audio, int sample_rate);

/// Standardizes each band to zero mean and unit variance across frames
/// (population statistics); constant bands map to all-zeros.
LogMelSpectrogram standardize(const LogMelSpectrogram& spec);

/// Writes one frame per row (80 comma-separated values) with the header
/// `# hop_s=0.01 bands=80`.
void save_logmel_csv(const LogMelSpectrogram& spec, const std::filesystem::path& path);

}  // namespace syllaseg
