// features.cc

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

#include "geotag/features.h"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace geotag {

void MfccConfig::Check(int sample_rate) const {
  GEOTAG_VALIDATE(n_coeffs > 0 && n_coeffs <= n_mels,
                  "mfcc: need 0 < n_coeffs <= n_mels (", n_coeffs, " vs ",
                  n_mels, ")");
  GEOTAG_VALIDATE(hop_fraction > 0.0 && hop_fraction <= 1.0,
                  "mfcc: hop_fraction must be in (0, 1]");
  GEOTAG_VALIDATE(window_ms > 0.0, "mfcc: window_ms must be positive");
  GEOTAG_VALIDATE(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0,
                  "mfcc: need 0 <= fmin < fmax <= sample_rate/2");
  GEOTAG_VALIDATE(delta_width >= 1, "mfcc: delta_width must be >= 1");
  GEOTAG_VALIDATE(WindowLength(sample_rate) >= 2, "mfcc: window too short");
}

int MfccConfig::WindowLength(int sample_rate) const {
  return static_cast<int>(std::lround(sample_rate * window_ms / 1000.0));
}

int MfccConfig::HopLength(int sample_rate) const {
  return std::max(1, static_cast<int>(std::lround(WindowLength(sample_rate) *
                                                  hop_fraction)));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Matrix MelFilterbank(int n_mels, int fft_size, int sample_rate, double fmin,
                     double fmax) {
  const int n_bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(fmin), mel_hi = HzToMel(fmax);
  const double mel_step = (mel_hi - mel_lo) / (n_mels + 1);
  Matrix fb = Matrix::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double left = mel_lo + m * mel_step;
    const double center = left + mel_step;
    const double right = center + mel_step;
    for (int b = 0; b < n_bins; ++b) {
      const double mel = HzToMel(static_cast<double>(b) * sample_rate / fft_size);
      if (mel > left && mel < right) {
        fb(m, b) = mel <= center ? (mel - left) / (center - left)
                                 : (right - mel) / (right - center);
      }
    }
  }
  return fb;
}

Matrix DctMatrix(int n, int n_keep) {
  Matrix dct(n_keep, n);
  for (int i = 0; i < n_keep; ++i) {
    const double scale = i == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int j = 0; j < n; ++j)
      dct(i, j) = scale * std::cos(std::numbers::pi * i * (j + 0.5) / n);
  }
  return dct;
}

int NumFrames(std::size_t n_samples, const MfccConfig &cfg, int sample_rate) {
  const auto window = static_cast<std::size_t>(cfg.WindowLength(sample_rate));
  const auto hop = static_cast<std::size_t>(cfg.HopLength(sample_rate));
  if (n_samples < window) return 0;
  return static_cast<int>((n_samples - window) / hop + 1);
}

namespace {

// FFTW planning is not thread safe; execution on a private plan is.
std::mutex fftw_planner_mutex;

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex);
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  double *input() { return in_; }

  // Writes |X_k|^2 for k = 0..n/2.
  void PowerSpectrum(Eigen::Ref<Vector> power) {
    fftw_execute(plan_);
    for (int k = 0; k <= n_ / 2; ++k)
      power(k) = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  int n_;
  double *in_;
  fftw_complex *out_;
  fftw_plan plan_;
};

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

FeatureMatrix ComputeMfcc(const AudioClip &clip, const MfccConfig &cfg) {
  cfg.Check(clip.sample_rate);
  const int window = cfg.WindowLength(clip.sample_rate);
  const int hop = cfg.HopLength(clip.sample_rate);
  const int n_frames = NumFrames(clip.samples.size(), cfg, clip.sample_rate);
  GEOTAG_VALIDATE(n_frames > 0, clip.source_path,
                  ": insufficient samples for one analysis window (",
                  clip.samples.size(), " < ", window, ")");

  const int fft_size = NextPowerOfTwo(window);
  const Matrix fbank =
      MelFilterbank(cfg.n_mels, fft_size, clip.sample_rate, cfg.fmin, cfg.fmax);
  const Matrix dct = DctMatrix(cfg.n_mels, cfg.n_coeffs);

  Vector hamming(window);
  for (int i = 0; i < window; ++i)
    hamming(i) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (window - 1));

  std::vector<double> emphasized(clip.samples.size());
  emphasized[0] = clip.samples[0];
  for (std::size_t i = 1; i < clip.samples.size(); ++i)
    emphasized[i] = clip.samples[i] - cfg.pre_emphasis * clip.samples[i - 1];

  RealFft fft(fft_size);
  Vector power(fft_size / 2 + 1);
  FeatureMatrix mfcc(cfg.n_coeffs, n_frames);
  for (int t = 0; t < n_frames; ++t) {
    double *buf = fft.input();
    const std::size_t start = static_cast<std::size_t>(t) * hop;
    for (int i = 0; i < window; ++i) buf[i] = emphasized[start + i] * hamming(i);
    for (int i = window; i < fft_size; ++i) buf[i] = 0.0;
    fft.PowerSpectrum(power);
    Vector log_mel = (fbank * power).array().max(kLogEnergyFloor).log();
    mfcc.col(t) = dct * log_mel;
  }
  return mfcc;
}

FeatureMatrix ComputeDeltas(const FeatureMatrix &feats, int width) {
  GEOTAG_VALIDATE(width >= 1, "delta width must be >= 1, got ", width);
  GEOTAG_VALIDATE(feats.cols() >= 1, "delta input has no frames");
  const Eigen::Index n = feats.cols();
  double denom = 0.0;
  for (int w = 1; w <= width; ++w) denom += w * w;
  denom *= 2.0;
  FeatureMatrix out = FeatureMatrix::Zero(feats.rows(), n);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int w = 1; w <= width; ++w) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + w, n - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - w, 0);
      out.col(t) += w * (feats.col(ahead) - feats.col(behind));
    }
    out.col(t) /= denom;
  }
  return out;
}

FeatureMatrix ExtractMfca(const AudioClip &clip, const MfccConfig &cfg) {
  FeatureMatrix mfcc = ComputeMfcc(clip, cfg);
  FeatureMatrix delta = ComputeDeltas(mfcc, cfg.delta_width);
  FeatureMatrix accel = ComputeDeltas(delta, cfg.delta_width);
  FeatureMatrix out(3 * mfcc.rows(), mfcc.cols());
  out << mfcc, delta, accel;
  return out;
}

}  // namespace geotag
