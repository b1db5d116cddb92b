// archive.cc

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


#include "geotag/archive.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace geotag {

namespace {

constexpr const char *kFormat = "geotag-archive";

const Json &Field(const Json &j, const char *key) {
  GEOTAG_VALIDATE(j.is_object() && j.contains(key), "schema violation: missing field '",
                  key, "'");
  return j.at(key);
}

double Number(const Json &j, const char *what) {
  GEOTAG_VALIDATE(j.is_number(), "schema violation: '", what, "' is not a number");
  return j.get<double>();
}

std::vector<std::string> Strings(const Json &j, const char *what) {
  GEOTAG_VALIDATE(j.is_array(), "schema violation: '", what, "' is not an array");
  std::vector<std::string> out;
  for (const Json &s : j) {
    GEOTAG_VALIDATE(s.is_string(), "schema violation: '", what,
                    "' holds a non-string");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<double> Numbers(const Json &j, const char *what) {
  GEOTAG_VALIDATE(j.is_array(), "schema violation: '", what, "' is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json &x : j) out.push_back(Number(x, what));
  return out;
}

std::string ChecksumOf(const ModelArchive &a) {
  std::string bytes = ArchiveKindName(a.kind);
  bytes += '\n' + std::to_string(a.version) + '\n' + a.digest + '\n';
  bytes += a.payload.dump();
  return HexDigest(Fnv1a(bytes));
}

void ValidatePayload(ArchiveKind kind, const Json &payload) {
  switch (kind) {
    case ArchiveKind::kBasis: BasisFromJson(payload); break;
    case ArchiveKind::kGmm: GmmFromJson(payload); break;
    case ArchiveKind::kSvm: SvmFromJson(payload); break;
    case ArchiveKind::kKernel: KernelFromJson(payload); break;
    case ArchiveKind::kReport: ReportFromJson(payload); break;
    case ArchiveKind::kFeatures: {
      const std::string layout = Field(payload, "layout").get<std::string>();
      if (layout == "matrix") {
        const Matrix m = MatrixFromJson(Field(payload, "matrix"));
        GEOTAG_VALIDATE(Field(payload, "d").get<Eigen::Index>() == m.rows() &&
                            Field(payload, "n").get<Eigen::Index>() == m.cols(),
                        "schema violation: frame matrix d/n do not match its values");
      }
      else if (layout == "table")
        FeatureTableFromJson(payload);
      else
        GEOTAG_VALIDATE(false, "schema violation: unknown features layout '", layout,
                        "'");
      break;
    }
  }
}

}  // namespace

const char *ArchiveKindName(ArchiveKind kind) {
  switch (kind) {
    case ArchiveKind::kBasis: return "basis";
    case ArchiveKind::kGmm: return "gmm";
    case ArchiveKind::kSvm: return "svm";
    case ArchiveKind::kKernel: return "kernel";
    case ArchiveKind::kFeatures: return "features";
    case ArchiveKind::kReport: return "report";
  }
  return "?";
}

ArchiveKind ParseArchiveKind(const std::string &name) {
  for (ArchiveKind k : {ArchiveKind::kBasis, ArchiveKind::kGmm, ArchiveKind::kSvm,
                        ArchiveKind::kKernel, ArchiveKind::kFeatures,
                        ArchiveKind::kReport})
    if (name == ArchiveKindName(k)) return k;
  throw ValidationError("schema violation: unknown archive kind '" + name + "'");
}

std::uint64_t Fnv1a(const std::string &bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string HexDigest(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string SerializeArchive(const ModelArchive &archive) {
  Json doc;
  doc["format"] = kFormat;
  doc["kind"] = ArchiveKindName(archive.kind);
  doc["version"] = archive.version;
  doc["digest"] = archive.digest;
  doc["checksum"] = ChecksumOf(archive);
  doc["payload"] = archive.payload;
  return doc.dump(1) + "\n";
}

ModelArchive ParseArchive(const std::string &text, const std::string &source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception &) {
    throw ValidationError("checksum failure: " + source +
                          " is truncated or is not a readable archive");
  }
  try {
    GEOTAG_VALIDATE(doc.is_object() && doc.value("format", "") == kFormat,
                    "schema violation: ", source, " is not a geotag archive");
    ModelArchive a;
    a.version = Field(doc, "version").get<int>();
    GEOTAG_VALIDATE(a.version == kArchiveVersion, "unsupported version ", a.version,
                    " in ", source, " (expected ", kArchiveVersion, ")");
    a.kind = ParseArchiveKind(Field(doc, "kind").get<std::string>());
    a.digest = Field(doc, "digest").get<std::string>();
    a.payload = Field(doc, "payload");
    GEOTAG_VALIDATE(Field(doc, "checksum").get<std::string>() == ChecksumOf(a),
                    "checksum failure: ", source, " has been modified or corrupted");
    ValidatePayload(a.kind, a.payload);
    return a;
  } catch (const Json::exception &e) {
    throw ValidationError("schema violation in " + source + ": " + e.what());
  }
}

void WriteFileAtomic(const std::filesystem::path &path, const std::string &text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw RuntimeError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw RuntimeError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  GEOTAG_VALIDATE(in.good(), "cannot open ", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void SaveArchive(const ModelArchive &archive, const std::filesystem::path &path) {
  WriteFileAtomic(path, SerializeArchive(archive));
}

ModelArchive LoadArchive(const std::filesystem::path &path) {
  return ParseArchive(ReadFile(path), path.string());
}

bool TryLoadCurrent(const std::filesystem::path &path, ArchiveKind kind,
                    const std::string &digest, ModelArchive *out) {
  if (!std::filesystem::exists(path)) return false;
  try {
    ModelArchive a = LoadArchive(path);
    if (a.kind != kind || a.digest != digest) return false;
    *out = std::move(a);
    return true;
  } catch (const ValidationError &e) {
    GEOTAG_WARN("ignoring stale archive ", path.string(), ": ", e.what());
    return false;
  }
}

Json MatrixToJson(const Matrix &m) {
  GEOTAG_VALIDATE(m.allFinite(), "archive: refusing to store non-finite values");
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix MatrixFromJson(const Json &j) {
  const auto rows = Field(j, "rows").get<Eigen::Index>();
  const auto cols = Field(j, "cols").get<Eigen::Index>();
  GEOTAG_VALIDATE(rows >= 0 && cols >= 0, "schema violation: negative matrix shape");
  const std::vector<double> data = Numbers(Field(j, "data"), "data");
  GEOTAG_VALIDATE(static_cast<Eigen::Index>(data.size()) == rows * cols,
                  "schema violation: matrix data has ", data.size(), " values for a ",
                  rows, "x", cols, " matrix");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  return m;
}

Json VectorToJson(const Vector &v) {
  GEOTAG_VALIDATE(v.allFinite(), "archive: refusing to store non-finite values");
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector VectorFromJson(const Json &j) {
  const std::vector<double> data = Numbers(j, "vector");
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

Json BasisToJson(const BasisMatrix &basis, const std::vector<double> &trace) {
  return {{"class_name", basis.class_name},
          {"d", basis.dim()},
          {"k", basis.k()},
          {"values", MatrixToJson(basis.values)},
          {"trace", trace}};
}

BasisMatrix BasisFromJson(const Json &j, std::vector<double> *trace) {
  BasisMatrix b;
  b.class_name = Field(j, "class_name").get<std::string>();
  b.values = MatrixFromJson(Field(j, "values"));
  GEOTAG_VALIDATE(b.values.size() > 0, "schema violation: empty basis");
  GEOTAG_VALIDATE(Field(j, "d").get<Eigen::Index>() == b.dim() &&
                      Field(j, "k").get<Eigen::Index>() == b.k(),
                  "schema violation: basis d/k do not match its values");
  if (trace) *trace = Numbers(Field(j, "trace"), "trace");
  return b;
}

Json GmmToJson(const GmmModel &model) {
  return {{"G", model.num_components()},
          {"D", model.dim()},
          {"weights", VectorToJson(model.weights)},
          {"means", MatrixToJson(model.means)},
          {"variances", MatrixToJson(model.variances)}};
}

GmmModel GmmFromJson(const Json &j) {
  GmmModel g;
  g.weights = VectorFromJson(Field(j, "weights"));
  g.means = MatrixFromJson(Field(j, "means"));
  g.variances = MatrixFromJson(Field(j, "variances"));
  g.Check();
  GEOTAG_VALIDATE(Field(j, "G").get<Eigen::Index>() == g.num_components() &&
                      Field(j, "D").get<Eigen::Index>() == g.dim(),
                  "schema violation: GMM G/D do not match its parameters");
  return g;
}

Json SvmToJson(const SvmModel &model) {
  return {{"support_ids", model.support_ids},
          {"dual_coeffs", model.dual_coeffs},
          {"bias", model.bias},
          {"C", model.C},
          {"kernel_ref", model.kernel_ref}};
}

SvmModel SvmFromJson(const Json &j) {
  SvmModel m;
  m.support_ids = Strings(Field(j, "support_ids"), "support_ids");
  m.dual_coeffs = Numbers(Field(j, "dual_coeffs"), "dual_coeffs");
  m.bias = Number(Field(j, "bias"), "bias");
  m.C = Number(Field(j, "C"), "C");
  m.kernel_ref = Field(j, "kernel_ref").get<std::string>();
  GEOTAG_VALIDATE(m.support_ids.size() == m.dual_coeffs.size(),
                  "schema violation: support_ids and dual_coeffs differ in length");
  GEOTAG_VALIDATE(m.C > 0.0, "schema violation: C must be > 0");
  for (double a : m.dual_coeffs)
    GEOTAG_VALIDATE(std::abs(a) <= m.C * (1.0 + 1e-12),
                    "schema violation: dual coefficient outside [-C, C]");
  return m;
}

Json KernelToJson(const KernelMatrix &kernel,
                  const std::map<std::string, double> &components) {
  GEOTAG_VALIDATE(kernel.values.allFinite(), "archive: refusing to store non-finite values");
  const Eigen::Index n = kernel.values.rows();
  Json lower = Json::array();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) lower.push_back(kernel.values(i, j));
  Json j = {{"n", n},
            {"row_ids", kernel.row_ids},
            {"lower", std::move(lower)},
            {"components", components}};
  j["gamma"] = kernel.gamma ? Json(*kernel.gamma) : Json(nullptr);
  return j;
}

KernelMatrix KernelFromJson(const Json &j, std::map<std::string, double> *components) {
  KernelMatrix k;
  const auto n = Field(j, "n").get<Eigen::Index>();
  k.row_ids = Strings(Field(j, "row_ids"), "row_ids");
  GEOTAG_VALIDATE(n >= 0 && static_cast<std::size_t>(n) == k.row_ids.size(),
                  "schema violation: kernel size does not match its ids");
  const std::vector<double> lower = Numbers(Field(j, "lower"), "lower");
  GEOTAG_VALIDATE(static_cast<Eigen::Index>(lower.size()) == n * (n + 1) / 2,
                  "schema violation: kernel has ", lower.size(),
                  " lower-triangle values for n = ", n);
  k.values.resize(n, n);
  std::size_t at = 0;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c <= r; ++c) k.values(r, c) = k.values(c, r) = lower[at++];
  const Json &gamma = Field(j, "gamma");
  if (!gamma.is_null()) k.gamma = Number(gamma, "gamma");
  const Json &comp = Field(j, "components");
  GEOTAG_VALIDATE(comp.is_object(), "schema violation: 'components' is not an object");
  if (components) {
    components->clear();
    for (const auto &[name, value] : comp.items())
      (*components)[name] = Number(value, "components");
  }
  return k;
}

Json ReportToJson(const EvalReport &report) {
  return {{"per_city_ap", report.per_city_ap},
          {"map", report.map},
          {"config_digest", report.config_digest},
          {"best_C", report.best_C},
          {"notes", report.notes}};
}

EvalReport ReportFromJson(const Json &j) {
  EvalReport r;
  for (const auto &[city, ap] : Field(j, "per_city_ap").items()) {
    r.per_city_ap[city] = Number(ap, "per_city_ap");
    GEOTAG_VALIDATE(r.per_city_ap[city] >= 0.0 && r.per_city_ap[city] <= 1.0,
                    "schema violation: AP outside [0, 1]");
  }
  for (const auto &[city, c] : Field(j, "best_C").items())
    r.best_C[city] = Number(c, "best_C");
  r.map = Number(Field(j, "map"), "map");
  r.config_digest = Field(j, "config_digest").get<std::string>();
  r.notes = Strings(Field(j, "notes"), "notes");
  return r;
}

Json FeatureTableToJson(const FeatureTable &table) {
  Json entries = Json::object();
  for (const auto &[id, vecs] : table.features) {
    GEOTAG_VALIDATE(vecs.size() == table.channels.size(),
                    "feature table: recording '", id, "' has ", vecs.size(),
                    " vectors for ", table.channels.size(), " channels");
    Json row = Json::array();
    for (const Vector &v : vecs) row.push_back(VectorToJson(v));
    entries[id] = std::move(row);
  }
  return {{"layout", "table"},
          {"featurizer", table.featurizer},
          {"channels", table.channels},
          {"entries", std::move(entries)},
          {"skipped", table.skipped}};
}

FeatureTable FeatureTableFromJson(const Json &j) {
  GEOTAG_VALIDATE(Field(j, "layout").get<std::string>() == "table",
                  "schema violation: features archive is not a table");
  FeatureTable t;
  t.featurizer = Field(j, "featurizer").get<std::string>();
  t.channels = Strings(Field(j, "channels"), "channels");
  t.skipped = Strings(Field(j, "skipped"), "skipped");
  for (const auto &[id, row] : Field(j, "entries").items()) {
    GEOTAG_VALIDATE(row.is_array() && row.size() == t.channels.size(),
                    "schema violation: recording '", id, "' has the wrong channel count");
    std::vector<Vector> vecs;
    for (const Json &v : row) vecs.push_back(VectorFromJson(v));
    t.features[id] = std::move(vecs);
  }
  return t;
}

ModelArchive FrameArchive(const FeatureMatrix &frames) {
  ModelArchive a;
  a.kind = ArchiveKind::kFeatures;
  a.payload = {{"layout", "matrix"},
               {"d", frames.rows()},
               {"n", frames.cols()},
               {"matrix", MatrixToJson(frames)}};
  return a;
}

FeatureMatrix FramesFromArchive(const ModelArchive &archive) {
  GEOTAG_VALIDATE(archive.kind == ArchiveKind::kFeatures &&
                      archive.payload.value("layout", "") == "matrix",
                  "expected a features archive with layout 'matrix'");
  FeatureMatrix m = MatrixFromJson(archive.payload.at("matrix"));
  GEOTAG_VALIDATE(m.rows() > 0 && m.cols() > 0, "empty frame matrix");
  return m;
}

}  // namespace geotag
