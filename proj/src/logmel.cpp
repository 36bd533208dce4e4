#include "syllaseg/logmel.h"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "syllaseg/boundary_io.h"
#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

constexpr int kSampleRate = 44100;
constexpr int kWindowSamples = 1102;  // 25 ms at 44.1 kHz
constexpr int kFftSize = 2048;
constexpr int kHopSamples = 441;  // 10 ms
constexpr int kSpectrumBins = kFftSize / 2 + 1;
constexpr double kFmaxHz = 11000.0;
constexpr double kPowerFloor = 1e-5;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filterbank with band edges uniformly spaced on the mel axis
// between 0 and kFmaxHz; weights sampled at the FFT bin frequencies.
std::vector<double> mel_filterbank() {
  std::vector<double> edges_hz(LogMelSpectrogram::kBands + 2);
  const double mel_max = hz_to_mel(kFmaxHz);
  for (size_t e = 0; e < edges_hz.size(); ++e) {
    edges_hz[e] = mel_to_hz(mel_max * static_cast<double>(e) / (edges_hz.size() - 1));
  }

  std::vector<double> weights(LogMelSpectrogram::kBands * kSpectrumBins, 0.0);
  for (size_t band = 0; band < LogMelSpectrogram::kBands; ++band) {
    const double lo = edges_hz[band];
    const double center = edges_hz[band + 1];
    const double hi = edges_hz[band + 2];
    for (int k = 0; k < kSpectrumBins; ++k) {
      const double f = static_cast<double>(k) * kSampleRate / kFftSize;
      double w = 0.0;
      if (f >= lo && f <= center) {
        w = (f - lo) / (center - lo);
      } else if (f > center && f <= hi) {
        w = (hi - f) / (hi - center);
      }
      weights[band * kSpectrumBins + k] = w;
    }
  }
  return weights;
}

std::vector<double> hann_window(int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

struct FftwDeleter {
  void operator()(double* p) const { fftw_free(p); }
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// FFTW plan creation is not thread-safe; executions on private buffers are.
std::mutex fftw_plan_mutex;

}  // namespace

LogMelSpectrogram logmel_spectrogram(std::span<const double> audio, int sample_rate) {
  if (sample_rate != kSampleRate) {
    throw ValidationError("unsupported sample rate " + std::to_string(sample_rate) +
                          " Hz (expected 44100)");
  }
  if (audio.size() < static_cast<size_t>(kWindowSamples)) {
    throw ValidationError("audio shorter than one analysis window (" +
                          std::to_string(audio.size()) + " < " +
                          std::to_string(kWindowSamples) + " samples)");
  }

  const size_t num_frames = (audio.size() - kWindowSamples) / kHopSamples + 1;
  static const std::vector<double> window = hann_window(kWindowSamples);
  static const std::vector<double> filterbank = mel_filterbank();

  std::unique_ptr<double[], FftwDeleter> in(fftw_alloc_real(kFftSize));
  std::unique_ptr<fftw_complex[], FftwDeleter> out(fftw_alloc_complex(kSpectrumBins));

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    plan = fftw_plan_dft_r2c_1d(kFftSize, in.get(), out.get(), FFTW_ESTIMATE);
  }

  LogMelSpectrogram spec;
  spec.num_frames = num_frames;
  spec.data.resize(num_frames * LogMelSpectrogram::kBands);

  std::vector<double> power(kSpectrumBins);
  for (size_t frame = 0; frame < num_frames; ++frame) {
    const double* src = audio.data() + frame * kHopSamples;
    for (int i = 0; i < kWindowSamples; ++i) in[i] = src[i] * window[i];
    for (int i = kWindowSamples; i < kFftSize; ++i) in[i] = 0.0;

    fftw_execute(plan);
    for (int k = 0; k < kSpectrumBins; ++k) {
      power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    }

    for (size_t band = 0; band < LogMelSpectrogram::kBands; ++band) {
      const double* w = filterbank.data() + band * kSpectrumBins;
      double energy = 0.0;
      for (int k = 0; k < kSpectrumBins; ++k) energy += w[k] * power[k];
      spec.at(frame, band) = std::log(std::max(energy, kPowerFloor));
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(plan);
  }
  return spec;
}

LogMelSpectrogram standardize(const LogMelSpectrogram& spec) {
  if (spec.num_frames == 0) {
    throw ValidationError("empty spectrogram");
  }

  LogMelSpectrogram out = spec;
  const double n = static_cast<double>(spec.num_frames);
  for (size_t band = 0; band < LogMelSpectrogram::kBands; ++band) {
    double mean = 0.0;
    for (size_t f = 0; f < spec.num_frames; ++f) mean += spec.at(f, band);
    mean /= n;

    double var = 0.0;
    for (size_t f = 0; f < spec.num_frames; ++f) {
      const double d = spec.at(f, band) - mean;
      var += d * d;
    }
    var /= n;

    if (var <= 0.0) {
      for (size_t f = 0; f < spec.num_frames; ++f) out.at(f, band) = 0.0;
    } else {
      const double inv_std = 1.0 / std::sqrt(var);
      for (size_t f = 0; f < spec.num_frames; ++f) {
        out.at(f, band) = (spec.at(f, band) - mean) * inv_std;
      }
    }
  }
  return out;
}

void save_logmel_csv(const LogMelSpectrogram& spec, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "# hop_s=0.01 bands=" << LogMelSpectrogram::kBands << "\n";
  char buf[40];
  for (size_t f = 0; f < spec.num_frames; ++f) {
    for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) {
      std::snprintf(buf, sizeof(buf), "%.9g", spec.at(f, b));
      out << buf << (b + 1 < LogMelSpectrogram::kBands ? "," : "\n");
    }
  }
  write_file_atomic(path, out.str());
}

}  // namespace syllaseg
