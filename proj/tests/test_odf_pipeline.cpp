#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "syllaseg/errors.h"
#include "syllaseg/logmel.h"
#include "syllaseg/odf.h"
#include "testing_util.h"

using namespace syllaseg;

namespace {

OnsetDetectionFunction make_odf(std::vector<double> values, double hop = 0.01) {
  OnsetDetectionFunction odf;
  odf.values = std::move(values);
  odf.hop_s = hop;
  return odf;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

TEST_CASE("smoothing impulse response is the normalized 5-point Hann") {
  const auto out = smooth_odf(make_odf({0, 0, 1, 0, 0}));
  CHECK(out.values == std::vector<double>{0.0, 0.25, 0.5, 0.25, 0.0});
}

TEST_CASE("smoothing preserves interior constants") {
  const auto out = smooth_odf(make_odf(std::vector<double>(9, 0.6)));
  for (size_t i = 2; i + 2 < out.values.size(); ++i) {
    CHECK(out.values[i] == doctest::Approx(0.6).epsilon(1e-12));
  }
}

TEST_CASE("smoothing zero-pads the edges") {
  const auto out = smooth_odf(make_odf({1, 0, 0, 0, 1}));
  const std::vector<double> expected{0.5, 0.25, 0.0, 0.25, 0.5};
  REQUIRE(out.values.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(out.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("smoothing rejects short inputs") {
  CHECK_THROWS_AS(smooth_odf(make_odf({0.1, 0.2, 0.3, 0.4})), ValidationError);
}

TEST_CASE("smoothing conserves mass of interior-supported signals and is linear") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> value(0.0, 0.45);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(40, 0.0);
    std::vector<double> y(40, 0.0);
    for (size_t i = 3; i < 37; ++i) {
      x[i] = value(rng);
      y[i] = value(rng);
    }
    const auto sx = smooth_odf(make_odf(x));
    const auto sy = smooth_odf(make_odf(y));

    double in_sum = 0.0;
    double out_sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      in_sum += x[i];
      out_sum += sx.values[i];
    }
    CHECK(std::abs(in_sum - out_sum) < 1e-6);

    // a*x + b*y with a + b <= 1 keeps everything inside [0, 1], so the clip
    // stays inactive and linearity is exact.
    const double a = 0.6;
    const double b = 0.4;
    std::vector<double> mix(40);
    for (size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * y[i];
    const auto smix = smooth_odf(make_odf(mix));
    for (size_t i = 0; i < mix.size(); ++i) {
      CHECK(std::abs(smix.values[i] - (a * sx.values[i] + b * sy.values[i])) < 1e-9);
    }
  }
}

TEST_CASE("ODF CSV round trip") {
  testutil::TempDir tmp;
  OnsetDetectionFunction odf = make_odf({0.0, 0.123456789, 0.5, 1.0, 0.99999999}, 0.01);
  save_odf(odf, tmp.file("a.csv"));
  const auto loaded = load_odf(tmp.file("a.csv"));
  CHECK(loaded.hop_s == odf.hop_s);
  REQUIRE(loaded.values.size() == odf.values.size());
  for (size_t i = 0; i < odf.values.size(); ++i) {
    CHECK(std::abs(loaded.values[i] - odf.values[i]) < 1e-9);
  }

  // Saving what was loaded reproduces the file byte for byte.
  save_odf(loaded, tmp.file("b.csv"));
  CHECK(testutil::read_file(tmp.file("a.csv")) == testutil::read_file(tmp.file("b.csv")));
}

TEST_CASE("ODF CSV errors name the offending line") {
  testutil::TempDir tmp;

  testutil::write_binary(tmp.file("c.csv"), "# hop_s=0.01\n0.1\n0.2\n1.5\n");
  try {
    load_odf(tmp.file("c.csv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }

  testutil::write_binary(tmp.file("d.csv"), "# hop_s=0.01\n0.1\nabc\n0.2\n");
  try {
    load_odf(tmp.file("d.csv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  testutil::write_binary(tmp.file("e.csv"), "0.1\n0.2\n");
  CHECK_THROWS_AS(load_odf(tmp.file("e.csv")), ParseError);

  testutil::write_binary(tmp.file("f.csv"), "# hop_s=0.01\n0.3\n0.4\n0.5\n");
  CHECK(load_odf(tmp.file("f.csv")).size() == 3);
}

TEST_CASE("synth_odf is deterministic and puts bumps on the onsets") {
  SynthOptions opts;
  opts.seed = 99;
  opts.distractor_count = 5;
  opts.noise_floor = 0.05;
  const std::vector<double> onsets{0.0, 1.0, 2.5};

  const auto first = synth_odf(onsets, 4.0, 0.01, opts);
  const auto second = synth_odf(onsets, 4.0, 0.01, opts);
  CHECK(first.values == second.values);

  SynthOptions other = opts;
  other.seed = 100;
  CHECK(synth_odf(onsets, 4.0, 0.01, other).values != first.values);

  // On-grid onsets carry at least the minimum bump amplitude.
  for (double t : onsets) {
    const size_t frame = static_cast<size_t>(std::llround(t / 0.01));
    CHECK(first.values[frame] >= 0.6);
  }

  SynthOptions plain;
  plain.seed = 1;
  const auto lone = synth_odf({1.0}, 2.0, 0.01, plain);
  const auto argmax =
      std::max_element(lone.values.begin(), lone.values.end()) - lone.values.begin();
  CHECK(argmax == 100);
}

TEST_CASE("synth_odf validates the onset list") {
  SynthOptions opts;
  CHECK_THROWS_AS(synth_odf({-0.1}, 2.0, 0.01, opts), ValidationError);
  CHECK_THROWS_AS(synth_odf({2.5}, 2.0, 0.01, opts), ValidationError);
  CHECK_THROWS_AS(synth_odf({1.0, 0.5}, 2.0, 0.01, opts), ValidationError);
}

TEST_CASE("peak_pick selects separated local maxima above the threshold") {
  std::vector<double> quiet(100, 0.1);
  quiet[50] = 0.9;
  const auto single = peak_pick(make_odf(quiet), 0.5, 0.1);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(0.50));

  CHECK(peak_pick(make_odf(std::vector<double>(50, 0.3)), 0.5, 0.1).empty());

  std::vector<double> pair(100, 0.0);
  pair[50] = 0.8;
  pair[55] = 0.7;  // within 0.1 s of the stronger peak
  const auto winner = peak_pick(make_odf(pair), 0.5, 0.1);
  REQUIRE(winner.size() == 1);
  CHECK(winner[0] == doctest::Approx(0.50));
}

TEST_CASE("peak_pick output is increasing and separated") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(200);
    for (double& v : values) v = value(rng);
    const auto picks = peak_pick(make_odf(values), 0.4, 0.05);
    for (size_t i = 1; i < picks.size(); ++i) {
      CHECK(picks[i] > picks[i - 1]);
      CHECK(picks[i] - picks[i - 1] >= 0.05 - 1e-12);
    }
  }
}

TEST_CASE("logmel frame count follows the window/hop arithmetic") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.1);

  std::vector<double> second(44100);
  for (double& s : second) s = noise(rng);
  const auto spec = logmel_spectrogram(second, 44100);
  CHECK(spec.num_frames == 98);
  CHECK(LogMelSpectrogram::kBands == 80);

  for (int trial = 0; trial < 10; ++trial) {
    const size_t samples = 1102 + rng() % 100000;
    std::vector<double> audio(samples);
    for (double& s : audio) s = noise(rng);
    CHECK(logmel_spectrogram(audio, 44100).num_frames == (samples - 1102) / 441 + 1);
  }

  CHECK_THROWS_AS(logmel_spectrogram(second, 22050), ValidationError);
  CHECK_THROWS_AS(logmel_spectrogram(std::vector<double>(500, 0.0), 44100), ValidationError);
}

TEST_CASE("logmel of silence is flat at the floor") {
  const auto spec = logmel_spectrogram(std::vector<double>(22050, 0.0), 44100);
  const double floor_log = std::log(1e-5);
  for (size_t f = 0; f < spec.num_frames; ++f) {
    for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) {
      CHECK(spec.at(f, b) == doctest::Approx(floor_log).epsilon(1e-12));
    }
  }

  const auto standardized = standardize(spec);
  for (size_t f = 0; f < standardized.num_frames; ++f) {
    for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) {
      CHECK(standardized.at(f, b) == 0.0);
    }
  }
}

TEST_CASE("a 1 kHz sine concentrates energy in the band containing 1 kHz") {
  std::vector<double> audio(44100);
  for (size_t i = 0; i < audio.size(); ++i) {
    audio[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 1000.0 * i / 44100.0);
  }
  const auto spec = logmel_spectrogram(audio, 44100);

  std::vector<double> band_energy(LogMelSpectrogram::kBands, 0.0);
  for (size_t f = 0; f < spec.num_frames; ++f) {
    for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) band_energy[b] += spec.at(f, b);
  }
  const size_t argmax =
      std::max_element(band_energy.begin(), band_energy.end()) - band_energy.begin();

  // The winning band's triangular support must contain 1 kHz.
  const double mel_max = hz_to_mel(11000.0);
  const double lo = mel_to_hz(mel_max * argmax / 81.0);
  const double hi = mel_to_hz(mel_max * (argmax + 2) / 81.0);
  CHECK(lo <= 1000.0);
  CHECK(1000.0 <= hi);
}

TEST_CASE("standardize yields zero mean and unit variance per band") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 0.2);
  std::vector<double> audio(44100);
  for (double& s : audio) s = noise(rng);

  const auto spec = standardize(logmel_spectrogram(audio, 44100));
  for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) {
    double mean = 0.0;
    for (size_t f = 0; f < spec.num_frames; ++f) mean += spec.at(f, b);
    mean /= spec.num_frames;
    double var = 0.0;
    for (size_t f = 0; f < spec.num_frames; ++f) {
      var += (spec.at(f, b) - mean) * (spec.at(f, b) - mean);
    }
    var /= spec.num_frames;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-6);
  }
}

TEST_CASE("standardize maps a two-frame band to -1, 1") {
  LogMelSpectrogram spec;
  spec.num_frames = 2;
  spec.data.assign(2 * LogMelSpectrogram::kBands, 0.0);
  for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) {
    spec.at(0, b) = 3.0;
    spec.at(1, b) = 7.0;
  }
  const auto out = standardize(spec);
  for (size_t b = 0; b < LogMelSpectrogram::kBands; ++b) {
    CHECK(out.at(0, b) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(out.at(1, b) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ODF validation rejects out-of-range values") {
  CHECK_THROWS_AS(make_odf({0.5, 1.5}).validate(), ValidationError);
  CHECK_THROWS_AS(make_odf({0.5}).validate(), ValidationError);
  CHECK_THROWS_AS(make_odf({0.5, 0.5}, 0.0).validate(), ValidationError);
  CHECK_NOTHROW(make_odf({0.0, 1.0}).validate());
}
