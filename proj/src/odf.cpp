#include "syllaseg/odf.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "syllaseg/boundary_io.h"
#include "syllaseg/errors.h"

namespace syllaseg {

namespace {

// 5-point Hann window normalized to unit sum; the zero endpoints make it an
// effective 3-tap kernel, so constants are preserved.
constexpr double kSmoothKernel[5] = {0.0, 0.25, 0.5, 0.25, 0.0};

constexpr double kBumpStdS = 0.015;            // synth bump std, 15 ms
constexpr double kDistractorClearanceS = 0.1;  // min distance to a true onset

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_strict_double(const std::string& text, bool* ok) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  *ok = end == begin + text.size() && !text.empty();
  return value;
}

}  // namespace

double OnsetDetectionFunction::grid_duration_s() const {
  return values.empty() ? 0.0 : (static_cast<double>(values.size()) - 1.0) * hop_s;
}

void OnsetDetectionFunction::validate() const {
  if (!(hop_s > 0.0)) {
    throw ValidationError("ODF hop must be positive");
  }
  if (values.size() < 2) {
    throw ValidationError("ODF needs at least 2 frames, got " + std::to_string(values.size()));
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0 || values[i] > 1.0) {
      throw ValidationError("ODF value at frame " + std::to_string(i) + " outside [0,1]");
    }
  }
}

OnsetDetectionFunction smooth_odf(const OnsetDetectionFunction& odf) {
  if (odf.values.size() < 5) {
    throw ValidationError("smoothing needs at least 5 frames, got " +
                          std::to_string(odf.values.size()));
  }

  const auto& x = odf.values;
  const int n = static_cast<int>(x.size());

  OnsetDetectionFunction out;
  out.hop_s = odf.hop_s;
  out.values.resize(x.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
      const int j = i + k - 2;
      if (j >= 0 && j < n) acc += kSmoothKernel[k] * x[j];
    }
    out.values[i] = std::clamp(acc, 0.0, 1.0);
  }
  return out;
}

OnsetDetectionFunction load_odf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open ODF file: " + path.string());
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty file");
  }
  const std::string header = trim(line);
  const std::string prefix = "# hop_s=";
  if (header.rfind(prefix, 0) != 0) {
    throw ParseError(path.string() + ": line 1: missing `# hop_s=` header");
  }
  bool ok = false;
  const double hop = parse_strict_double(header.substr(prefix.size()), &ok);
  if (!ok || !(hop > 0.0)) {
    throw ParseError(path.string() + ": line 1: bad hop value");
  }

  OnsetDetectionFunction odf;
  odf.hop_s = hop;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;  // tolerate a trailing blank line
    const double value = parse_strict_double(text, &ok);
    if (!ok || !std::isfinite(value)) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": not a number");
    }
    if (value < 0.0 || value > 1.0) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": value outside [0,1]");
    }
    odf.values.push_back(value);
  }
  odf.validate();
  return odf;
}

void save_odf(const OnsetDetectionFunction& odf, const std::filesystem::path& path) {
  odf.validate();
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# hop_s=%.17g\n", odf.hop_s);
  out << buf;
  for (double v : odf.values) {
    std::snprintf(buf, sizeof(buf), "%.9f\n", v);
    out << buf;
  }
  write_file_atomic(path, out.str());
}

OnsetDetectionFunction synth_odf(const std::vector<double>& true_onsets_s,
                                 double total_duration_s, double hop_s,
                                 const SynthOptions& opts) {
  if (!(hop_s > 0.0)) {
    throw ValidationError("hop must be positive");
  }
  if (!(total_duration_s > 0.0)) {
    throw ValidationError("total duration must be positive");
  }
  for (size_t i = 0; i < true_onsets_s.size(); ++i) {
    const double t = true_onsets_s[i];
    if (t < 0.0 || t >= total_duration_s) {
      throw ValidationError("onset " + std::to_string(i) + " at " + std::to_string(t) +
                            " s outside [0, " + std::to_string(total_duration_s) + ")");
    }
    if (i > 0 && !(t > true_onsets_s[i - 1])) {
      throw ValidationError("onsets must be strictly increasing (index " + std::to_string(i) +
                            ")");
    }
  }
  if (opts.distractor_count < 0 || opts.distractor_amp_min > opts.distractor_amp_max) {
    throw ValidationError("bad distractor options");
  }

  const int n_frames = static_cast<int>(std::llround(total_duration_s / hop_s)) + 1;
  OnsetDetectionFunction odf;
  odf.hop_s = hop_s;
  odf.values.assign(static_cast<size_t>(std::max(n_frames, 2)), 0.0);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> onset_amp(0.6, 1.0);
  std::uniform_real_distribution<double> distractor_amp(opts.distractor_amp_min,
                                                        opts.distractor_amp_max);

  auto add_bump = [&](double center_s, double amp) {
    const int center = static_cast<int>(std::llround(center_s / hop_s));
    const int radius = static_cast<int>(std::ceil(4.0 * kBumpStdS / hop_s));
    for (int f = std::max(0, center - radius);
         f <= std::min(static_cast<int>(odf.values.size()) - 1, center + radius); ++f) {
      const double dt = f * hop_s - center_s;
      odf.values[f] += amp * std::exp(-dt * dt / (2.0 * kBumpStdS * kBumpStdS));
    }
  };

  for (double t : true_onsets_s) {
    add_bump(t, onset_amp(rng));
  }

  double region_lo = 0.0;
  double region_hi = total_duration_s;
  if (opts.distractor_region) {
    region_lo = std::max(0.0, opts.distractor_region->first);
    region_hi = std::min(total_duration_s, opts.distractor_region->second);
    if (!(region_hi > region_lo)) {
      throw ValidationError("empty distractor region");
    }
  }
  std::uniform_real_distribution<double> position(region_lo, region_hi);
  for (int d = 0; d < opts.distractor_count; ++d) {
    double t = 0.0;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      t = position(rng);
      bool clear = true;
      for (double onset : true_onsets_s) {
        if (std::abs(t - onset) < kDistractorClearanceS) {
          clear = false;
          break;
        }
      }
      if (clear) break;
      if (attempt == 9999) {
        throw ValidationError("cannot place distractor away from the true onsets");
      }
    }
    add_bump(t, distractor_amp(rng));
  }

  if (opts.noise_floor > 0.0) {
    std::uniform_real_distribution<double> noise(0.0, opts.noise_floor);
    for (double& v : odf.values) v += noise(rng);
  }
  for (double& v : odf.values) v = std::clamp(v, 0.0, 1.0);
  return odf;
}

std::vector<double> peak_pick(const OnsetDetectionFunction& odf, double threshold,
                              double min_separation_s) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw ValidationError("threshold must be in [0,1]");
  }

  const auto& v = odf.values;
  const int n = static_cast<int>(v.size());

  // Candidate local maxima; plateaus keep their leftmost frame.
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i) {
    const bool rises = i == 0 || v[i] >= v[i - 1];
    const bool falls = i == n - 1 || v[i] > v[i + 1];
    if (rises && falls && v[i] > threshold) candidates.push_back(i);
  }

  // Greedy by height, ties broken toward earlier frames.
  std::vector<int> order = candidates;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return v[a] > v[b]; });

  std::vector<int> accepted;
  for (int frame : order) {
    bool clear = true;
    for (int kept : accepted) {
      if (std::abs(frame - kept) * odf.hop_s < min_separation_s) {
        clear = false;
        break;
      }
    }
    if (clear) accepted.push_back(frame);
  }
  std::sort(accepted.begin(), accepted.end());

  std::vector<double> times;
  times.reserve(accepted.size());
  for (int frame : accepted) times.push_back(frame * odf.hop_s);
  return times;
}

}  // namespace syllaseg
