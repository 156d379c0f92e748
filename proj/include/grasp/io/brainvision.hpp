#pragma once

// Reader for the BrainVision Core Data Format subset written by BrainAmp
// amplifiers: multiplexed binary samples, INT_16 or IEEE_FLOAT_32, little-endian.

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "grasp/error.hpp"
#include "grasp/io/ini.hpp"
#include "grasp/types.hpp"

namespace grasp::io {

enum class BinaryFormat { INT_16, IEEE_FLOAT_32 };
enum class Orientation { MULTIPLEXED };

inline std::size_t sample_width(BinaryFormat f) { return f == BinaryFormat::INT_16 ? 2 : 4; }

struct ChannelMeta {
  std::string label;
  double resolution = 1.0;
  std::string unit = "µV";

  bool operator==(const ChannelMeta&) const = default;
};

struct HeaderInfo {
  std::size_t n_channels = 0;
  double sampling_rate_hz = 0.0;
  double sampling_interval_us = 0.0;
  BinaryFormat binary_format = BinaryFormat::INT_16;
  Orientation orientation = Orientation::MULTIPLEXED;
  std::vector<ChannelMeta> channel_meta;
  std::string data_file;
  std::string marker_file;
};

/// Cue descriptions ("S  1", ...) mapped to class ids, plus descriptions that
/// mark the start of a rest period. Anything else becomes MarkerKind::Other.
struct MarkerMap {
  std::map<std::string, int> cues;
  std::set<std::string> rest;
};

namespace detail {

inline std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

inline double parse_double(const std::string& s, ErrorKind kind, const std::string& what) {
  const std::string t = IniDocument::trim(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    fail(kind, "cannot parse number '" + t + "' for " + what);
  }
}

inline long long parse_int(const std::string& s, ErrorKind kind, const std::string& what) {
  const std::string t = IniDocument::trim(s);
  long long v = 0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc{} || ptr != end || t.empty()) fail(kind, "cannot parse integer '" + t + "' for " + what);
  return v;
}

inline std::vector<std::string> split_fields(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  // BrainVision escapes literal commas inside fields as "\1".
  for (auto& f : out) {
    std::size_t p = 0;
    while ((p = f.find("\\1", p)) != std::string::npos) f.replace(p, 2, ",");
  }
  return out;
}

inline double unit_to_microvolts(const std::string& unit) {
  if (unit.empty() || unit == "µV" || unit == "uV" || unit == "\xB5V" || unit == "μV") return 1.0;
  if (unit == "mV") return 1e3;
  if (unit == "V") return 1e6;
  if (unit == "nV") return 1e-3;
  fail(ErrorKind::UnsupportedFormat, "unsupported channel unit '" + unit + "'");
}

inline bool looks_like_emg(const std::string& label) {
  if (label.size() < 3) return false;
  std::string head = label.substr(0, 3);
  std::transform(head.begin(), head.end(), head.begin(), [](unsigned char c) { return std::toupper(c); });
  return head == "EMG";
}

inline std::string read_file(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Parses a .vhdr header. Unknown keys and sections are ignored.
inline HeaderInfo parse_vhdr(std::string_view text) {
  const IniDocument doc = IniDocument::parse(text);
  auto require = [&](const std::string& section, const std::string& key) -> const IniEntry& {
    const IniEntry* e = doc.find(section, key);
    if (!e) fail(ErrorKind::MissingKey, key + " missing from [" + section + "]");
    return *e;
  };

  HeaderInfo h;
  const IniEntry& n_entry = require("Common Infos", "NumberOfChannels");
  const long long n = detail::parse_int(n_entry.value, ErrorKind::MissingKey, "NumberOfChannels" + detail::at_line(n_entry.line));
  if (n <= 0) fail(ErrorKind::UnsupportedFormat, "NumberOfChannels must be positive" + detail::at_line(n_entry.line));
  h.n_channels = static_cast<std::size_t>(n);

  const IniEntry& si = require("Common Infos", "SamplingInterval");
  h.sampling_interval_us = detail::parse_double(si.value, ErrorKind::MissingKey, "SamplingInterval" + detail::at_line(si.line));
  if (!(h.sampling_interval_us > 0))
    fail(ErrorKind::UnsupportedFormat, "SamplingInterval must be positive" + detail::at_line(si.line));
  h.sampling_rate_hz = 1e6 / h.sampling_interval_us;

  const IniEntry& orient = require("Common Infos", "DataOrientation");
  if (IniDocument::trim(orient.value) != "MULTIPLEXED")
    fail(ErrorKind::UnsupportedFormat,
         "DataOrientation '" + IniDocument::trim(orient.value) + "' not supported" + detail::at_line(orient.line));

  if (const IniEntry* df = doc.find("Common Infos", "DataFormat"); df && IniDocument::trim(df->value) != "BINARY")
    fail(ErrorKind::UnsupportedFormat, "DataFormat '" + IniDocument::trim(df->value) + "' not supported" + detail::at_line(df->line));
  if (const IniEntry* e = doc.find("Common Infos", "DataFile")) h.data_file = IniDocument::trim(e->value);
  if (const IniEntry* e = doc.find("Common Infos", "MarkerFile")) h.marker_file = IniDocument::trim(e->value);

  const IniEntry& bf = require("Binary Infos", "BinaryFormat");
  const std::string fmt = IniDocument::trim(bf.value);
  if (fmt == "INT_16") {
    h.binary_format = BinaryFormat::INT_16;
  } else if (fmt == "IEEE_FLOAT_32") {
    h.binary_format = BinaryFormat::IEEE_FLOAT_32;
  } else {
    fail(ErrorKind::UnsupportedFormat, "BinaryFormat '" + fmt + "' not supported" + detail::at_line(bf.line));
  }

  h.channel_meta.resize(h.n_channels);
  for (std::size_t c = 0; c < h.n_channels; ++c) {
    const std::string key = "Ch" + std::to_string(c + 1);
    const IniEntry& ch = require("Channel Infos", key);
    const auto fields = detail::split_fields(ch.value);
    ChannelMeta meta;
    meta.label = fields[0];
    if (meta.label.empty()) fail(ErrorKind::MissingKey, key + " has no channel name" + detail::at_line(ch.line));
    if (fields.size() > 2 && !IniDocument::trim(fields[2]).empty())
      meta.resolution = detail::parse_double(fields[2], ErrorKind::UnsupportedFormat, key + " resolution" + detail::at_line(ch.line));
    if (!(meta.resolution > 0))
      fail(ErrorKind::UnsupportedFormat, key + " resolution must be positive" + detail::at_line(ch.line));
    if (fields.size() > 3 && !IniDocument::trim(fields[3]).empty()) meta.unit = IniDocument::trim(fields[3]);
    h.channel_meta[c] = std::move(meta);
  }
  return h;
}

/// Parses the [Marker Infos] section of a .vmrk file. Positions are taken
/// verbatim as sample indices.
inline std::vector<Marker> parse_vmrk(std::string_view text, const MarkerMap& map) {
  const IniDocument doc = IniDocument::parse(text);
  std::vector<Marker> out;
  for (const auto& e : doc.section("Marker Infos")) {
    if (e.key.rfind("Mk", 0) != 0)
      fail(ErrorKind::MalformedLine, "unexpected entry '" + e.key + "'" + detail::at_line(e.line));
    const auto fields = detail::split_fields(e.value);
    if (fields.size() < 3)
      fail(ErrorKind::MalformedLine, e.key + "=" + e.value + detail::at_line(e.line));
    const long long pos = detail::parse_int(fields[2], ErrorKind::MalformedLine, e.key + " position" + detail::at_line(e.line));
    if (pos < 0) fail(ErrorKind::MalformedLine, e.key + " has a negative position" + detail::at_line(e.line));

    Marker m;
    m.sample_index = static_cast<std::size_t>(pos);
    m.description = fields[1];
    if (auto it = map.cues.find(m.description); it != map.cues.end()) {
      m.kind = MarkerKind::CueOnset;
      m.class_id = it->second;
    } else if (map.rest.count(m.description)) {
      m.kind = MarkerKind::RestOnset;
    }
    out.push_back(std::move(m));
  }
  return out;
}

/// Decodes a multiplexed little-endian payload into microvolts. Channels whose
/// label is listed in emg_labels, or starts with "EMG", are tagged EMG.
inline Recording read_brainvision(const HeaderInfo& header, std::span<const std::uint8_t> raw,
                                  std::vector<Marker> markers, const std::set<std::string>& emg_labels = {}) {
  const std::size_t width = sample_width(header.binary_format);
  const std::size_t frame = header.n_channels * width;
  if (header.n_channels == 0 || header.channel_meta.size() != header.n_channels)
    fail(ErrorKind::SchemaError, "header channel metadata does not match NumberOfChannels");
  if (raw.size() % frame != 0)
    fail(ErrorKind::LengthMismatch, std::to_string(raw.size()) + " payload bytes is not a multiple of " +
                                        std::to_string(frame) + " (channels x sample width)");
  const std::size_t n_samples = raw.size() / frame;

  Recording rec;
  rec.fs_hz = header.sampling_rate_hz;
  rec.data.resize(static_cast<Eigen::Index>(header.n_channels), static_cast<Eigen::Index>(n_samples));
  std::vector<double> scale(header.n_channels);
  for (std::size_t c = 0; c < header.n_channels; ++c) {
    const auto& meta = header.channel_meta[c];
    scale[c] = meta.resolution * detail::unit_to_microvolts(meta.unit);
    rec.labels.push_back(meta.label);
    rec.modality.push_back(emg_labels.count(meta.label) || detail::looks_like_emg(meta.label) ? Modality::EMG
                                                                                               : Modality::EEG);
  }

  const std::uint8_t* p = raw.data();
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t c = 0; c < header.n_channels; ++c, p += width) {
      double v;
      if (header.binary_format == BinaryFormat::INT_16) {
        const auto u = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        v = static_cast<std::int16_t>(u);
      } else {
        const std::uint32_t u = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
                                (std::uint32_t(p[3]) << 24);
        v = std::bit_cast<float>(u);
      }
      rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) = v * scale[c];
    }
  }
  rec.markers = std::move(markers);
  rec.validate();
  return rec;
}

/// Loads a .vhdr/.vmrk/.eeg triplet; companion files are resolved relative to
/// the header. Error messages are prefixed with the offending file path.
inline Recording load_brainvision(const std::filesystem::path& vhdr_path, const MarkerMap& map,
                                  const std::set<std::string>& emg_labels = {}) {
  auto with_path = [](const std::filesystem::path& file, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(e.kind(), file.string() + ": " + e.message());
    }
  };
  const HeaderInfo header = with_path(vhdr_path, [&] { return parse_vhdr(detail::read_file(vhdr_path, false)); });
  const auto dir = vhdr_path.parent_path();
  const auto eeg_path = dir / (header.data_file.empty() ? vhdr_path.stem().string() + ".eeg" : header.data_file);
  const auto vmrk_path = dir / (header.marker_file.empty() ? vhdr_path.stem().string() + ".vmrk" : header.marker_file);

  std::vector<Marker> markers;
  if (std::filesystem::exists(vmrk_path))
    markers = with_path(vmrk_path, [&] { return parse_vmrk(detail::read_file(vmrk_path, false), map); });
  const std::string bytes = detail::read_file(eeg_path, true);
  return with_path(eeg_path, [&] {
    return read_brainvision(header, std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()),
                            std::move(markers), emg_labels);
  });
}

}  // namespace grasp::io
