#pragma once

// Session bundle: a JSON manifest plus a raw float32 payload.
//
//   {
//     "format": "grasp-session-bundle", "version": 1,
//     "fs_hz": 1000.0, "n_samples": 4000,
//     "channels": [{"label": "C3", "modality": "EEG"}, ...],
//     "markers": [{"kind": "cue", "class_id": 0, "sample": 1500, "description": "S  1"}, ...],
//     "payload": "session.f32"
//   }
//
// The payload holds n_channels * n_samples little-endian IEEE float32 values,
// channel-major (all samples of channel 0, then channel 1, ...).

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grasp/error.hpp"
#include "grasp/types.hpp"

namespace grasp::io {

inline constexpr const char* kBundleFormat = "grasp-session-bundle";

struct SessionBundle {
  std::string manifest;
  std::vector<std::uint8_t> payload;
};

namespace detail {

inline std::string marker_kind_name(MarkerKind k) {
  switch (k) {
    case MarkerKind::CueOnset: return "cue";
    case MarkerKind::RestOnset: return "rest";
    case MarkerKind::Other: return "other";
  }
  return "other";
}

inline MarkerKind marker_kind_from(const std::string& s) {
  if (s == "cue") return MarkerKind::CueOnset;
  if (s == "rest") return MarkerKind::RestOnset;
  if (s == "other") return MarkerKind::Other;
  fail(ErrorKind::SchemaError, "unknown marker kind '" + s + "'");
}

template <typename T>
T get_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(ErrorKind::SchemaError, where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::SchemaError, where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline SessionBundle write_session_bundle(const Recording& rec, const std::string& payload_name = "session.f32") {
  rec.validate();
  nlohmann::json m;
  m["format"] = kBundleFormat;
  m["version"] = 1;
  m["fs_hz"] = rec.fs_hz;
  m["n_samples"] = rec.n_samples();
  m["payload"] = payload_name;
  auto& chans = m["channels"] = nlohmann::json::array();
  for (std::size_t c = 0; c < rec.n_channels(); ++c)
    chans.push_back({{"label", rec.labels[c]}, {"modality", to_string(rec.modality[c])}});
  auto& marks = m["markers"] = nlohmann::json::array();
  for (const auto& mk : rec.markers) {
    nlohmann::json j{{"kind", detail::marker_kind_name(mk.kind)}, {"sample", mk.sample_index}};
    if (mk.class_id) j["class_id"] = *mk.class_id;
    if (!mk.description.empty()) j["description"] = mk.description;
    marks.push_back(std::move(j));
  }

  SessionBundle out;
  out.manifest = m.dump(2) + "\n";
  out.payload.resize(rec.n_channels() * rec.n_samples() * 4);
  std::uint8_t* p = out.payload.data();
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    for (Eigen::Index s = 0; s < rec.data.cols(); ++s, p += 4) {
      const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(rec.data(c, s)));
      p[0] = static_cast<std::uint8_t>(u);
      p[1] = static_cast<std::uint8_t>(u >> 8);
      p[2] = static_cast<std::uint8_t>(u >> 16);
      p[3] = static_cast<std::uint8_t>(u >> 24);
    }
  }
  return out;
}

inline Recording read_session_bundle(std::string_view manifest, std::span<const std::uint8_t> payload) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(manifest);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::SchemaError, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (detail::get_field<std::string>(m, "format", "manifest") != kBundleFormat)
    fail(ErrorKind::SchemaError, "manifest format is not " + std::string(kBundleFormat));

  Recording rec;
  rec.fs_hz = detail::get_field<double>(m, "fs_hz", "manifest");
  const auto n_samples = detail::get_field<std::size_t>(m, "n_samples", "manifest");
  const auto chans = detail::get_field<nlohmann::json>(m, "channels", "manifest");
  if (!chans.is_array()) fail(ErrorKind::SchemaError, "manifest: 'channels' must be an array");
  for (std::size_t i = 0; i < chans.size(); ++i) {
    const std::string where = "channels[" + std::to_string(i) + "]";
    rec.labels.push_back(detail::get_field<std::string>(chans[i], "label", where));
    rec.modality.push_back(modality_from_string(detail::get_field<std::string>(chans[i], "modality", where)));
  }
  const auto marks = detail::get_field<nlohmann::json>(m, "markers", "manifest");
  if (!marks.is_array()) fail(ErrorKind::SchemaError, "manifest: 'markers' must be an array");
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const std::string where = "markers[" + std::to_string(i) + "]";
    Marker mk;
    mk.kind = detail::marker_kind_from(detail::get_field<std::string>(marks[i], "kind", where));
    mk.sample_index = detail::get_field<std::size_t>(marks[i], "sample", where);
    if (marks[i].contains("class_id")) mk.class_id = detail::get_field<int>(marks[i], "class_id", where);
    if (marks[i].contains("description")) mk.description = detail::get_field<std::string>(marks[i], "description", where);
    rec.markers.push_back(std::move(mk));
  }

  const std::size_t n_ch = rec.labels.size();
  if (payload.size() != n_ch * n_samples * 4)
    fail(ErrorKind::SchemaError, "payload holds " + std::to_string(payload.size()) + " bytes but manifest declares " +
                                     std::to_string(n_ch) + " channels x " + std::to_string(n_samples) + " samples");
  rec.data.resize(static_cast<Eigen::Index>(n_ch), static_cast<Eigen::Index>(n_samples));
  const std::uint8_t* p = payload.data();
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    for (Eigen::Index s = 0; s < rec.data.cols(); ++s, p += 4) {
      const std::uint32_t u = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
                              (std::uint32_t(p[3]) << 24);
      rec.data(c, s) = std::bit_cast<float>(u);
    }
  }
  try {
    rec.validate();
  } catch (const Error& e) {
    fail(ErrorKind::SchemaError, e.message());
  }
  return rec;
}

/// Writes `path` atomically: the bytes land in a sibling temp file first.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoFailure, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::IoFailure, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Saves `<dir>/<stem>.json` + `<dir>/<stem>.f32`.
inline std::filesystem::path save_session_bundle(const Recording& rec, const std::filesystem::path& dir,
                                                 const std::string& stem = "session") {
  const auto bundle = write_session_bundle(rec, stem + ".f32");
  write_file_atomic(dir / (stem + ".f32"), std::span<const std::uint8_t>(bundle.payload));
  const auto manifest_path = dir / (stem + ".json");
  write_file_atomic(manifest_path, bundle.manifest);
  return manifest_path;
}

inline Recording load_session_bundle(const std::filesystem::path& manifest_path) {
  const auto manifest_bytes = read_binary_file(manifest_path);
  const std::string manifest(manifest_bytes.begin(), manifest_bytes.end());
  std::string payload_name;
  try {
    payload_name = nlohmann::json::parse(manifest).value("payload", manifest_path.stem().string() + ".f32");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaError, manifest_path.string() + ": " + e.what());
  }
  const auto payload = read_binary_file(manifest_path.parent_path() / payload_name);
  try {
    return read_session_bundle(manifest, payload);
  } catch (const Error& e) {
    throw Error(e.kind(), manifest_path.string() + ": " + e.message());
  }
}

}  // namespace grasp::io
