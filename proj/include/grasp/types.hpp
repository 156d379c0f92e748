#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grasp/error.hpp"

namespace grasp {

/// Channels x samples, one channel per contiguous row.
using SignalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kNumClasses = 5;

enum class Modality { EEG, EMG };

inline std::string to_string(Modality m) { return m == Modality::EEG ? "EEG" : "EMG"; }

inline Modality modality_from_string(const std::string& s) {
  if (s == "EEG") return Modality::EEG;
  if (s == "EMG") return Modality::EMG;
  fail(ErrorKind::SchemaError, "unknown modality '" + s + "'");
}

enum class MarkerKind { CueOnset, RestOnset, Other };

struct Marker {
  MarkerKind kind = MarkerKind::Other;
  std::optional<int> class_id;
  std::size_t sample_index = 0;
  std::string description;

  bool operator==(const Marker&) const = default;
};

/// Continuous multichannel signal in microvolts.
struct Recording {
  SignalMatrix data;
  double fs_hz = 0.0;
  std::vector<std::string> labels;
  std::vector<Modality> modality;
  std::vector<Marker> markers;

  std::size_t n_channels() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_samples() const { return static_cast<std::size_t>(data.cols()); }
  double duration_s() const { return fs_hz > 0 ? static_cast<double>(n_samples()) / fs_hz : 0.0; }

  std::optional<std::size_t> channel_index(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    return std::nullopt;
  }

  /// Throws InvalidRecording when the shape, rate or marker invariants fail.
  void validate() const {
    if (!(fs_hz > 0.0) || !std::isfinite(fs_hz))
      fail(ErrorKind::InvalidRecording, "sampling rate must be positive");
    if (labels.size() != n_channels() || modality.size() != n_channels())
      fail(ErrorKind::InvalidRecording, "labels/modality do not match channel count");
    for (const auto& mk : markers) {
      if (mk.sample_index >= n_samples())
        fail(ErrorKind::InvalidRecording,
             "marker at sample " + std::to_string(mk.sample_index) + " beyond recording end");
      if (mk.kind == MarkerKind::CueOnset &&
          (!mk.class_id || *mk.class_id < 0 || *mk.class_id >= kNumClasses))
        fail(ErrorKind::InvalidRecording, "cue marker without a valid class id");
    }
  }

  bool operator==(const Recording& o) const {
    return fs_hz == o.fs_hz && labels == o.labels && modality == o.modality &&
           markers == o.markers && data.rows() == o.data.rows() && data.cols() == o.data.cols() &&
           data == o.data;
  }
};

struct TrialEpoch {
  int class_id = 0;
  SignalMatrix data;
  double fs_hz = 0.0;
  /// Epoch start relative to the cue, seconds.
  double t0_offset_s = 0.0;

  std::size_t n_channels() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_samples() const { return static_cast<std::size_t>(data.cols()); }
};

struct TrialSet {
  std::vector<TrialEpoch> epochs;
  std::vector<std::string> channel_labels;
  std::vector<Modality> modality;

  std::size_t size() const { return epochs.size(); }
  bool empty() const { return epochs.empty(); }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(epochs.size());
    for (const auto& e : epochs) out.push_back(e.class_id);
    return out;
  }

  std::optional<std::size_t> channel_index(const std::string& label) const {
    for (std::size_t i = 0; i < channel_labels.size(); ++i)
      if (channel_labels[i] == label) return i;
    return std::nullopt;
  }
};

inline std::map<int, std::size_t> class_histogram(const std::vector<int>& labels) {
  std::map<int, std::size_t> h;
  for (int c : labels) ++h[c];
  return h;
}

inline std::map<int, std::size_t> cue_histogram(const Recording& rec) {
  std::map<int, std::size_t> h;
  for (const auto& m : rec.markers)
    if (m.kind == MarkerKind::CueOnset && m.class_id) ++h[*m.class_id];
  return h;
}

}  // namespace grasp
