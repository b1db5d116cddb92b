// tests/dataset_test.cc

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
#include <fstream>

#include "geotag/dataset.h"
#include "test_util.h"

namespace geotag {
namespace {

using testing::Contains;
using testing::ErrorOf;

// Hand-assembled RIFF header: 16-bit PCM with the given format tag.
std::vector<std::uint8_t> RawWav(int format, int channels, int rate,
                                 const std::vector<std::int16_t> &samples,
                                 std::uint32_t declared_data = 0xffffffff) {
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(v & 0xff);
    b.push_back(v >> 8);
  };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  u32(36 + data_bytes);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * 2);
  u16(channels * 2);
  u16(16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  u32(declared_data == 0xffffffff ? data_bytes : declared_data);
  for (std::int16_t s : samples) u16(static_cast<std::uint16_t>(s));
  return b;
}

TEST_CASE("manifest parses rows in order") {
  const DatasetManifest m =
      ParseManifest("path,label,split\na.wav,paris,train\nb.wav,rome,test\n");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0] == ManifestEntry{"a.wav", "paris", Split::kTrain});
  CHECK(m.entries[1] == ManifestEntry{"b.wav", "rome", Split::kTest});
  CHECK(m.Labels() == std::vector<std::string>{"paris", "rome"});
}

TEST_CASE("manifest rejects duplicates, bad splits and bad rows") {
  const std::string dup = ErrorOf<ValidationError>(
      [] { ParseManifest("path,label,split\na.wav,x,train\na.wav,y,test\n"); });
  CHECK(Contains(dup, "duplicate path 'a.wav'"));
  CHECK(Contains(dup, "line 3"));

  const std::string dev = ErrorOf<ValidationError>(
      [] { ParseManifest("path,label,split\na.wav,x,dev\n"); });
  CHECK(Contains(dev, "unknown split"));
  CHECK(Contains(dev, "line 2"));

  const std::string cols = ErrorOf<ValidationError>(
      [] { ParseManifest("path,label,split\na.wav,x\n"); });
  CHECK(Contains(cols, "line 2"));
  CHECK(Contains(cols, "3 columns"));

  CHECK(Contains(ErrorOf<ValidationError>([] { ParseManifest("a,b,c\n"); }), "header"));
  CHECK(Contains(ErrorOf<ValidationError>(
                     [] { ParseManifest("path,label,split\na.wav,,train\n"); }),
                 "empty label"));
  CHECK(Contains(ErrorOf<ValidationError>([] { LoadManifest("/nonexistent/m.csv"); }),
                 "cannot open"));
}

TEST_CASE("manifest write/load round trip") {
  testing::TempDir dir("manifest");
  DatasetManifest m;
  m.entries = {{"x/1.wav", "a b", Split::kTrain},
               {"x/2.wav", "c", Split::kTest},
               {"3.json", "a b", Split::kTest}};
  WriteManifest(m, dir.path() / "m.csv");
  const DatasetManifest back = LoadManifest(dir.path() / "m.csv");
  CHECK(back == m);
  CHECK(back.base_dir == dir.path());
  CHECK(back.Resolve("x/1.wav") == dir.path() / "x/1.wav");
}

TEST_CASE("decode 16 kHz mono silence") {
  const AudioClip clip = DecodeWavBytes(RawWav(1, 1, 16000, std::vector<std::int16_t>(16000)));
  CHECK(clip.sample_rate == 16000);
  REQUIRE(clip.samples.size() == 16000);
  for (double s : clip.samples) CHECK(s == 0.0);
}

TEST_CASE("decode averages stereo and scales by 32768") {
  std::vector<std::int16_t> inter;
  for (int i = 0; i < 100; ++i) {
    inter.push_back(16384);
    inter.push_back(-16384);
  }
  const AudioClip stereo = DecodeWavBytes(RawWav(1, 2, 16000, inter));
  REQUIRE(stereo.samples.size() == 100);
  for (double s : stereo.samples) CHECK(s == 0.0);

  const AudioClip extremes = DecodeWavBytes(RawWav(1, 1, 8000, {-32768, 32767, 16384}));
  CHECK(extremes.samples[0] == -1.0);
  CHECK(extremes.samples[1] == 32767.0 / 32768.0);
  CHECK(extremes.samples[2] == 0.5);
  CHECK(extremes.sample_rate == 8000);
}

TEST_CASE("decode errors") {
  CHECK(Contains(ErrorOf<ValidationError>(
                     [] { DecodeWavBytes(RawWav(3, 1, 16000, {1, 2, 3})); }),
                 "non-PCM"));
  CHECK(Contains(ErrorOf<ValidationError>(
                     [] { DecodeWavBytes(RawWav(1, 1, 16000, {})); }),
                 "zero-length data"));
  CHECK(!ErrorOf<ValidationError>([] {
           DecodeWavBytes(RawWav(1, 1, 16000, {1, 2, 3, 4}, 400));
         }).empty());
  std::vector<std::uint8_t> cut = RawWav(1, 1, 16000, std::vector<std::int16_t>(50));
  cut.resize(30);
  CHECK(!ErrorOf<ValidationError>([&] { DecodeWavBytes(cut); }).empty());
}

TEST_CASE("wav encode/decode round trip through a file") {
  testing::TempDir dir("wav");
  AudioClip clip;
  clip.sample_rate = 22050;
  for (int i = 0; i < 500; ++i) clip.samples.push_back(std::round(std::sin(i * 0.1) * 20000) / 32768.0);
  WriteWav(clip, dir.path() / "a.wav");
  const AudioClip back = DecodeWav(dir.path() / "a.wav");
  CHECK(back.sample_rate == 22050);
  CHECK(back.samples == clip.samples);
}

TEST_CASE("resample identity at 16 kHz") {
  AudioClip clip;
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) clip.samples.push_back(rng.Uniform(-1, 1));
  const AudioClip out = ResampleTo16k(clip);
  CHECK(out.samples == clip.samples);
  CHECK(out.sample_rate == 16000);
}

TEST_CASE("resample 32 kHz ramp") {
  AudioClip clip;
  clip.sample_rate = 32000;
  for (int i = 0; i < 32000; ++i) clip.samples.push_back(i / 31999.0);
  const AudioClip out = ResampleTo16k(clip);
  REQUIRE(out.samples.size() == 16000);
  double worst = 0.0;
  for (std::size_t j = 0; j < out.samples.size(); ++j)
    worst = std::max(worst, std::abs(out.samples[j] - j / 15999.0));
  CHECK(worst <= 1e-6);
}

TEST_CASE("resample lengths, bounds and rejection") {
  Rng rng(9);
  for (int rate : {8000, 11025, 22050, 44100, 48000}) {
    AudioClip clip;
    clip.sample_rate = rate;
    const int n = 1000 + static_cast<int>(rng.Index(3000));
    for (int i = 0; i < n; ++i) clip.samples.push_back(rng.Uniform(-0.7, 0.4));
    const AudioClip out = ResampleTo16k(clip);
    CHECK(out.samples.size() ==
          static_cast<std::size_t>(std::llround(n * 16000.0 / rate)));
    const auto [lo, hi] = std::minmax_element(clip.samples.begin(), clip.samples.end());
    for (double s : out.samples) {
      CHECK(s >= *lo);
      CHECK(s <= *hi);
    }
    CHECK(ResampleTo16k(clip).samples == out.samples);
  }
  AudioClip low;
  low.sample_rate = 4000;
  low.samples.assign(100, 0.0);
  CHECK(Contains(ErrorOf<ValidationError>([&] { ResampleTo16k(low); }), "8000"));
}

}  // namespace
}  // namespace geotag
