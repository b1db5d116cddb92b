// geotag/dataset.h

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

#ifndef GEOTAG_DATASET_H_
#define GEOTAG_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geotag/common.h"

namespace geotag {

constexpr int kCanonicalSampleRate = 16000;

/// Mono audio with amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;
  std::string source_path;

  /// Throws ValidationError if the clip is empty, the rate is not positive or
  /// any amplitude is non-finite.
  void Check() const;
};

enum class Split { kTrain, kTest };

const char *SplitName(Split split);
Split ParseSplit(const std::string &token);

struct ManifestEntry {
  std::string path;
  std::string label;
  Split split = Split::kTrain;

  bool operator==(const ManifestEntry &) const = default;
};

/// Ordered list of labelled recordings. Paths are unique.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  /// Directory relative paths are resolved against; empty means cwd.
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string &path) const;
  std::vector<std::string> Labels() const;  // sorted, unique
  bool operator==(const DatasetManifest &other) const {
    return entries == other.entries;
  }
};

/// Parses a CSV manifest with header `path,label,split`.
/// Errors name the offending (1-based) line.
DatasetManifest LoadManifest(const std::filesystem::path &path);
DatasetManifest ParseManifest(const std::string &text);
std::string FormatManifest(const DatasetManifest &manifest);
void WriteManifest(const DatasetManifest &manifest,
                   const std::filesystem::path &path);

/// Reads a RIFF/WAVE PCM 16-bit mono or stereo file. Stereo is averaged.
AudioClip DecodeWav(const std::filesystem::path &path);
AudioClip DecodeWavBytes(const std::vector<std::uint8_t> &bytes,
                         const std::string &source = "<memory>");

/// Encodes 16-bit PCM; amplitudes are clipped to [-1, 1) before quantizing.
std::vector<std::uint8_t> EncodeWav(const std::vector<std::vector<double>> &channels,
                                    int sample_rate);
void WriteWav(const AudioClip &clip, const std::filesystem::path &path);

/// Linear-interpolation resampler to 16 kHz with the first and last input
/// samples mapped onto the first and last output samples.
AudioClip ResampleTo16k(const AudioClip &clip);

}  // namespace geotag

#endif  // GEOTAG_DATASET_H_
