#include "syllaseg/audio_io.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

AudioBuffer read_wav_mono(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open WAV file: " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw ParseError(path.string() + ": not a RIFF/WAVE file");
  }

  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  bool have_fmt = false;

  size_t pos = 12;
  const unsigned char* data_chunk = nullptr;
  size_t data_size = 0;

  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t chunk_size = read_u32(chunk + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw ParseError(path.string() + ": truncated chunk");
    }

    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw ParseError(path.string() + ": fmt chunk too small");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_chunk = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size % 2);  // chunks are word-aligned
  }

  if (!have_fmt || data_chunk == nullptr) {
    throw ParseError(path.string() + ": missing fmt or data chunk");
  }
  if (channels != 1) {
    throw ParseError(path.string() + ": expected mono audio, got " + std::to_string(channels) +
                     " channels");
  }
  if (format == kFormatPcm && bits != 16) {
    throw ParseError(path.string() + ": only 16-bit PCM supported, got " + std::to_string(bits) +
                     "-bit");
  }
  if (format == kFormatFloat && bits != 32) {
    throw ParseError(path.string() + ": only 32-bit float supported, got " +
                     std::to_string(bits) + "-bit");
  }
  if (format != kFormatPcm && format != kFormatFloat) {
    throw ParseError(path.string() + ": unsupported WAV encoding " + std::to_string(format));
  }

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(sample_rate);

  if (format == kFormatPcm) {
    const size_t count = data_size / 2;
    audio.samples.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      const int16_t raw =
          static_cast<int16_t>(data_chunk[2 * i] | (data_chunk[2 * i + 1] << 8));
      audio.samples.push_back(raw / 32768.0);
    }
  } else {
    const size_t count = data_size / 4;
    audio.samples.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      float value = 0.0f;
      std::memcpy(&value, data_chunk + 4 * i, 4);
      audio.samples.push_back(static_cast<double>(value));
    }
  }
  return audio;
}

}  // namespace syllaseg
