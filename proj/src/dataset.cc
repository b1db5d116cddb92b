// dataset.cc

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

#include "geotag/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace geotag {

void AudioClip::Check() const {
  GEOTAG_VALIDATE(!samples.empty(), source_path, ": audio clip is empty");
  GEOTAG_VALIDATE(sample_rate > 0, source_path, ": bad sample rate ",
                  sample_rate);
  for (double s : samples)
    GEOTAG_VALIDATE(std::isfinite(s), source_path, ": non-finite sample");
}

const char *SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

Split ParseSplit(const std::string &token) {
  if (token == "train") return Split::kTrain;
  if (token == "test") return Split::kTest;
  throw ValidationError("unknown split '" + token + "'");
}

std::filesystem::path DatasetManifest::Resolve(const std::string &path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::vector<std::string> DatasetManifest::Labels() const {
  std::set<std::string> labels;
  for (const auto &e : entries) labels.insert(e.label);
  return {labels.begin(), labels.end()};
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

DatasetManifest ParseManifest(const std::string &text) {
  DatasetManifest manifest;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      GEOTAG_VALIDATE(line == "path,label,split",
                      "manifest line 1: expected header 'path,label,split'");
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    GEOTAG_VALIDATE(fields.size() == 3, "manifest line ", line_no,
                    ": expected 3 columns, got ", fields.size());
    ManifestEntry entry;
    entry.path = fields[0];
    entry.label = fields[1];
    GEOTAG_VALIDATE(!entry.path.empty(), "manifest line ", line_no,
                    ": empty path");
    GEOTAG_VALIDATE(!entry.label.empty(), "manifest line ", line_no,
                    ": empty label");
    try {
      entry.split = ParseSplit(fields[2]);
    } catch (const ValidationError &e) {
      throw ValidationError(internal::Concat("manifest line ", line_no, ": ",
                                             e.what()));
    }
    GEOTAG_VALIDATE(seen.insert(entry.path).second, "manifest line ", line_no,
                    ": duplicate path '", entry.path, "'");
    manifest.entries.push_back(std::move(entry));
  }
  GEOTAG_VALIDATE(have_header, "manifest is empty (missing header)");
  return manifest;
}

DatasetManifest LoadManifest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  GEOTAG_VALIDATE(in.good(), "cannot open manifest ", path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  DatasetManifest manifest;
  try {
    manifest = ParseManifest(text);
  } catch (const ValidationError &e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  manifest.base_dir = path.parent_path();
  return manifest;
}

std::string FormatManifest(const DatasetManifest &manifest) {
  std::string out = "path,label,split\n";
  for (const auto &e : manifest.entries) {
    GEOTAG_VALIDATE(e.path.find(',') == std::string::npos &&
                        e.label.find(',') == std::string::npos,
                    "manifest fields may not contain commas: ", e.path);
    out += e.path + "," + e.label + "," + SplitName(e.split) + "\n";
  }
  return out;
}

void WriteManifest(const DatasetManifest &manifest,
                   const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write manifest " + path.string());
  out << FormatManifest(manifest);
}

namespace {

std::uint32_t ReadU32(const std::uint8_t *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint16_t ReadU16(const std::uint8_t *p) {
  return std::uint16_t(p[0] | (p[1] << 8));
}

void PutU32(std::vector<std::uint8_t> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xff);
}

void PutU16(std::vector<std::uint8_t> *out, std::uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back(v >> 8);
}

// GUID tail shared by all KSDATAFORMAT_SUBTYPE_* values.
constexpr std::uint8_t kSubformatTail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                             0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};

}  // namespace

AudioClip DecodeWavBytes(const std::vector<std::uint8_t> &bytes,
                         const std::string &source) {
  const std::size_t size = bytes.size();
  GEOTAG_VALIDATE(size >= 12 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
                      std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
                  source, ": not a RIFF/WAVE file");
  std::size_t pos = 12;
  int channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (pos + 8 <= size) {
    const std::uint8_t *chunk = bytes.data() + pos;
    std::uint32_t chunk_size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      GEOTAG_VALIDATE(chunk_size >= 16 && body + chunk_size <= size, source,
                      ": truncated fmt chunk");
      std::uint16_t format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == 0xFFFE) {
        GEOTAG_VALIDATE(chunk_size >= 40, source,
                        ": truncated extensible fmt chunk");
        std::uint16_t sub = ReadU16(chunk + 8 + 24);
        GEOTAG_VALIDATE(
            sub == 1 && std::memcmp(chunk + 8 + 26, kSubformatTail, 14) == 0,
            source, ": non-PCM encoding");
      } else {
        GEOTAG_VALIDATE(format == 1, source, ": non-PCM encoding (format ",
                        format, ")");
      }
      GEOTAG_VALIDATE(bits == 16, source, ": only 16-bit PCM is supported, got ",
                      bits, " bits");
      GEOTAG_VALIDATE(channels == 1 || channels == 2, source,
                      ": unsupported channel count ", channels);
      GEOTAG_VALIDATE(rate > 0, source, ": zero sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      GEOTAG_VALIDATE(have_fmt, source, ": data chunk before fmt chunk");
      GEOTAG_VALIDATE(chunk_size > 0, source, ": zero-length data chunk");
      GEOTAG_VALIDATE(body + chunk_size <= size, source,
                      ": truncated data chunk (", chunk_size,
                      " bytes declared, ", size - body, " present)");
      const std::size_t frame_bytes = 2 * channels;
      const std::size_t n = chunk_size / frame_bytes;
      GEOTAG_VALIDATE(n > 0, source, ": data chunk holds no complete frame");
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.source_path = source;
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t *frame = bytes.data() + body + i * frame_bytes;
        double acc = 0.0;
        for (int c = 0; c < channels; ++c)
          acc += static_cast<std::int16_t>(ReadU16(frame + 2 * c)) / 32768.0;
        clip.samples[i] = acc / channels;
      }
      return clip;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw ValidationError(source + (have_fmt ? ": missing data chunk"
                                           : ": missing fmt chunk"));
}

AudioClip DecodeWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  GEOTAG_VALIDATE(in.good(), "cannot open audio file ", path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeWavBytes(bytes, path.string());
}

std::vector<std::uint8_t> EncodeWav(
    const std::vector<std::vector<double>> &channels, int sample_rate) {
  GEOTAG_VALIDATE(channels.size() == 1 || channels.size() == 2,
                  "EncodeWav: 1 or 2 channels required");
  const std::size_t n = channels[0].size();
  for (const auto &c : channels)
    GEOTAG_VALIDATE(c.size() == n, "EncodeWav: channel lengths differ");
  const auto num_channels = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * 2 * num_channels);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  for (char ch : std::string("RIFF")) out.push_back(ch);
  PutU32(&out, 36 + data_bytes);
  for (char ch : std::string("WAVEfmt ")) out.push_back(ch);
  PutU32(&out, 16);
  PutU16(&out, 1);
  PutU16(&out, num_channels);
  PutU32(&out, sample_rate);
  PutU32(&out, sample_rate * 2 * num_channels);
  PutU16(&out, 2 * num_channels);
  PutU16(&out, 16);
  for (char ch : std::string("data")) out.push_back(ch);
  PutU32(&out, data_bytes);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &c : channels) {
      double v = std::clamp(std::round(c[i] * 32768.0), -32768.0, 32767.0);
      PutU16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }
  }
  return out;
}

void WriteWav(const AudioClip &clip, const std::filesystem::path &path) {
  auto bytes = EncodeWav({clip.samples}, clip.sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

AudioClip ResampleTo16k(const AudioClip &clip) {
  GEOTAG_VALIDATE(clip.sample_rate >= 8000, clip.source_path,
                  ": sample rate ", clip.sample_rate,
                  " Hz is below the 8000 Hz minimum");
  GEOTAG_VALIDATE(!clip.samples.empty(), clip.source_path, ": empty clip");
  if (clip.sample_rate == kCanonicalSampleRate) return clip;

  const std::size_t n_in = clip.samples.size();
  const auto n_out = static_cast<std::size_t>(std::llround(
      static_cast<double>(n_in) * kCanonicalSampleRate / clip.sample_rate));
  AudioClip out;
  out.sample_rate = kCanonicalSampleRate;
  out.source_path = clip.source_path;
  if (n_out == 0) {
    out.samples.push_back(clip.samples.front());
    return out;
  }
  out.samples.resize(n_out);
  const double step =
      n_out > 1 ? static_cast<double>(n_in - 1) / static_cast<double>(n_out - 1)
                : 0.0;
  for (std::size_t j = 0; j < n_out; ++j) {
    const double t = j * step;
    auto i = static_cast<std::size_t>(t);
    if (i >= n_in - 1) {
      out.samples[j] = clip.samples[n_in - 1];
      continue;
    }
    const double frac = t - static_cast<double>(i);
    const double a = clip.samples[i], b = clip.samples[i + 1];
    // Convex combination; stays within [min(a,b), max(a,b)].
    out.samples[j] = (1.0 - frac) * a + frac * b;
  }
  return out;
}

}  // namespace geotag
