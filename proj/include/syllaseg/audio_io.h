/// @file audio_io.h
/// @brief Minimal WAV input for the feature pipeline.

#pragma once

#include <filesystem>
#include <vector>

namespace syllaseg {

struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Reads a mono PCM WAV file (16-bit integer or 32-bit float). Stereo input
/// and other encodings are rejected with an explicit ParseError.
AudioBuffer read_wav_mono(const std::filesystem::path& path);

}  // namespace syllaseg
