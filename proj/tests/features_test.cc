// tests/features_test.cc

// Copyright 2026  The Geotag Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#include "doctest.h"

#include <cmath>
#include <numbers>

#include "geotag/features.h"
#include "test_util.h"

namespace geotag {
namespace {

using testing::Contains;
using testing::ErrorOf;

AudioClip Noise(std::size_t n, std::uint64_t seed, double amp = 0.3) {
  AudioClip clip;
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) clip.samples.push_back(rng.Uniform(-amp, amp));
  return clip;
}

// Textbook MFCC with an O(N^2) DFT, written from the definitions.
Matrix ReferenceMfcc(const AudioClip &clip, const MfccConfig &cfg) {
  const int sr = clip.sample_rate;
  const int win = static_cast<int>(std::lround(sr * cfg.window_ms / 1000.0));
  const int hop = static_cast<int>(std::lround(win * cfg.hop_fraction));
  int nfft = 1;
  while (nfft < win) nfft *= 2;
  const int frames = (static_cast<int>(clip.samples.size()) - win) / hop + 1;
  const double pi = std::numbers::pi;
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  const double lo = mel(cfg.fmin), hi = mel(cfg.fmax);
  Matrix out(cfg.n_coeffs, frames);
  for (int t = 0; t < frames; ++t) {
    std::vector<double> x(nfft, 0.0);
    for (int i = 0; i < win; ++i) {
      const std::size_t s = static_cast<std::size_t>(t) * hop + i;
      const double prev = s == 0 ? 0.0 : clip.samples[s - 1];
      const double e = s == 0 ? clip.samples[0] : clip.samples[s] - cfg.pre_emphasis * prev;
      x[i] = e * (0.54 - 0.46 * std::cos(2 * pi * i / (win - 1)));
    }
    std::vector<double> logmel(cfg.n_mels);
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double l = lo + m * (hi - lo) / (cfg.n_mels + 1);
      const double c = lo + (m + 1) * (hi - lo) / (cfg.n_mels + 1);
      const double r = lo + (m + 2) * (hi - lo) / (cfg.n_mels + 1);
      double energy = 0.0;
      for (int k = 0; k <= nfft / 2; ++k) {
        const double fm = mel(static_cast<double>(k) * sr / nfft);
        double w = 0.0;
        if (fm > l && fm <= c) w = (fm - l) / (c - l);
        else if (fm > c && fm < r) w = (r - fm) / (r - c);
        if (w == 0.0) continue;
        double re = 0.0, im = 0.0;
        for (int n = 0; n < nfft; ++n) {
          re += x[n] * std::cos(2 * pi * k * n / nfft);
          im -= x[n] * std::sin(2 * pi * k * n / nfft);
        }
        energy += w * (re * re + im * im);
      }
      logmel[m] = std::log(std::max(energy, 1e-10));
    }
    for (int q = 0; q < cfg.n_coeffs; ++q) {
      double acc = 0.0;
      for (int m = 0; m < cfg.n_mels; ++m)
        acc += logmel[m] * std::cos(pi * q * (m + 0.5) / cfg.n_mels);
      out(q, t) = acc * std::sqrt((q == 0 ? 1.0 : 2.0) / cfg.n_mels);
    }
  }
  return out;
}

TEST_CASE("frame count for 0.9 s at 16 kHz") {
  MfccConfig cfg;
  CHECK(cfg.WindowLength(16000) == 480);
  CHECK(cfg.HopLength(16000) == 240);
  CHECK(NumFrames(14400, cfg, 16000) == 59);
  CHECK(ComputeMfcc(Noise(14400, 1), cfg).cols() == 59);
  for (std::size_t n : {480u, 481u, 719u, 720u, 16000u})
    CHECK(NumFrames(n, cfg, 16000) == static_cast<int>((n - 480) / 240 + 1));
}

TEST_CASE("mfcc matches a naive DFT reference") {
  MfccConfig cfg;
  const AudioClip clip = Noise(2400, 5);
  const Matrix got = ComputeMfcc(clip, cfg);
  const Matrix want = ReferenceMfcc(clip, cfg);
  REQUIRE(got.cols() == want.cols());
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mfcc of silence is constant in time") {
  AudioClip clip;
  clip.samples.assign(8000, 0.0);
  const Matrix m = ComputeMfcc(clip, MfccConfig{});
  for (Eigen::Index t = 1; t < m.cols(); ++t) CHECK(m.col(t) == m.col(0));
  CHECK(m.allFinite());
}

TEST_CASE("doubling amplitude shifts only c0") {
  MfccConfig cfg;
  AudioClip a = Noise(8000, 7);
  AudioClip b = a;
  for (double &s : b.samples) s *= 2.0;
  const Matrix ma = ComputeMfcc(a, cfg), mb = ComputeMfcc(b, cfg);
  const double shift = std::log(4.0) * std::sqrt(static_cast<double>(cfg.n_mels));
  CHECK((mb.row(0).array() - ma.row(0).array() - shift).abs().maxCoeff() < 1e-6);
  CHECK((mb.bottomRows(cfg.n_coeffs - 1) - ma.bottomRows(cfg.n_coeffs - 1))
            .cwiseAbs()
            .maxCoeff() < 1e-6);
}

TEST_CASE("mfcc input validation") {
  CHECK(Contains(ErrorOf<ValidationError>([] { ComputeMfcc(Noise(479, 1), MfccConfig{}); }),
                 "insufficient samples"));
  MfccConfig bad;
  bad.n_coeffs = 41;
  CHECK(!ErrorOf<ValidationError>([&] { ComputeMfcc(Noise(1000, 1), bad); }).empty());
  bad = MfccConfig{};
  bad.fmax = 9000;
  CHECK(!ErrorOf<ValidationError>([&] { ComputeMfcc(Noise(1000, 1), bad); }).empty());
}

TEST_CASE("dct is orthonormal and mel scale is HTK") {
  const Matrix d = DctMatrix(40, 40);
  CHECK((d * d.transpose() - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-10);
  Rng rng(2);
  const Vector v = testing::RandomNormal(40, 1, &rng);
  CHECK((d.transpose() * (d * v) - v).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(HzToMel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-14));
  CHECK(MelToHz(HzToMel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
}

TEST_CASE("deltas") {
  FeatureMatrix constant = FeatureMatrix::Constant(3, 10, 4.2);
  CHECK(ComputeDeltas(constant, 2).cwiseAbs().maxCoeff() == 0.0);
  FeatureMatrix single(3, 1);
  single << 1, -2, 3;
  CHECK(ComputeDeltas(single, 2).cwiseAbs().maxCoeff() == 0.0);
  FeatureMatrix ramp(1, 12);
  for (int t = 0; t < 12; ++t) ramp(0, t) = t;
  const FeatureMatrix d = ComputeDeltas(ramp, 2);
  for (int t = 2; t < 10; ++t) CHECK(d(0, t) == 1.0);
  CHECK(d(0, 0) < 1.0);
  CHECK(!ErrorOf<ValidationError>([&] { ComputeDeltas(ramp, 0); }).empty());
}

TEST_CASE("mfca stacks mfcc, delta and acceleration") {
  MfccConfig cfg;
  const AudioClip clip = Noise(16000, 11);
  const FeatureMatrix mfca = ExtractMfca(clip, cfg);
  const FeatureMatrix mfcc = ComputeMfcc(clip, cfg);
  CHECK(mfca.rows() == 60);
  CHECK(mfca.topRows(20) == mfcc);
  CHECK(mfca.middleRows(20, 20) == ComputeDeltas(mfcc, 2));
  CHECK(mfca.bottomRows(20) == ComputeDeltas(ComputeDeltas(mfcc, 2), 2));
  CHECK(mfca.allFinite());
  CHECK(ExtractMfca(clip, cfg) == mfca);

  AudioClip silent;
  silent.samples.assign(8000, 0.0);
  const FeatureMatrix s = ExtractMfca(silent, cfg);
  CHECK(s.bottomRows(40).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mfca is finite on extreme inputs") {
  AudioClip clip;
  for (int i = 0; i < 4000; ++i) clip.samples.push_back(i % 2 ? 1.0 : -1.0);
  for (int i = 0; i < 4000; ++i) clip.samples.push_back(i < 2000 ? 0.0 : 1e-300);
  CHECK(ExtractMfca(clip, MfccConfig{}).allFinite());
}

}  // namespace
}  // namespace geotag
