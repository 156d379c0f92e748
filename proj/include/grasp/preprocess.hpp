#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "grasp/error.hpp"
#include "grasp/filter.hpp"
#include "grasp/types.hpp"

namespace grasp {

/// The 20 motor-cortex electrodes used for decoding. The published list names
/// CP5 twice; the second occurrence is read as CP6 to keep the montage symmetric.
inline const std::vector<std::string>& motor_channels() {
  static const std::vector<std::string> names{"FC5", "FC3", "FC1", "FC2", "FC4", "FC6", "C5",
                                              "C3",  "C1",  "Cz",  "C2",  "C4",  "C6",  "CP5",
                                              "CP3", "CP1", "CPz", "CP2", "CP4", "CP6"};
  return names;
}

/// Which rows a filter touches.
enum class ChannelScope { All, EegOnly };

namespace detail {

inline void filter_rows(Recording& rec, const filter::Cascade& cascade, ChannelScope scope) {
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    if (scope == ChannelScope::EegOnly && rec.modality[static_cast<std::size_t>(c)] != Modality::EEG) continue;
    filter::filtfilt(cascade, std::span<double>(rec.data.row(c).data(), static_cast<std::size_t>(rec.data.cols())));
  }
}

}  // namespace detail

/// Zero-phase Butterworth band-pass (order/2 highpass + order/2 lowpass).
inline Recording bandpass(Recording rec, double lo_hz, double hi_hz, int order,
                          ChannelScope scope = ChannelScope::All) {
  const auto cascade = filter::butterworth_bandpass(order, lo_hz, hi_hz, rec.fs_hz);
  detail::filter_rows(rec, cascade, scope);
  return rec;
}

/// Zero-phase second-order notch, Q = f0 / bandwidth.
inline Recording notch(Recording rec, double f0_hz, double bandwidth_hz = 2.0,
                       ChannelScope scope = ChannelScope::All) {
  const auto cascade = filter::notch(f0_hz, bandwidth_hz, rec.fs_hz);
  detail::filter_rows(rec, cascade, scope);
  return rec;
}

inline Recording select_channels(const Recording& rec, const std::vector<std::string>& names) {
  Recording out;
  out.fs_hz = rec.fs_hz;
  out.markers = rec.markers;
  out.data.resize(static_cast<Eigen::Index>(names.size()), rec.data.cols());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto idx = rec.channel_index(names[i]);
    if (!idx) fail(ErrorKind::UnknownChannel, "channel '" + names[i] + "' not in recording");
    out.data.row(static_cast<Eigen::Index>(i)) = rec.data.row(static_cast<Eigen::Index>(*idx));
    out.labels.push_back(names[i]);
    out.modality.push_back(rec.modality[*idx]);
  }
  return out;
}

/// Keeps every factor-th sample. The caller is responsible for low-passing
/// below the new Nyquist first.
inline Recording downsample(Recording rec, int factor) {
  if (factor < 1) fail(ErrorKind::InvalidFactor, "downsample factor must be >= 1");
  if (factor == 1) return rec;
  const auto f = static_cast<std::size_t>(factor);
  const auto n_out = static_cast<Eigen::Index>(rec.n_samples() / f);
  SignalMatrix data(rec.data.rows(), n_out);
  for (Eigen::Index s = 0; s < n_out; ++s) data.col(s) = rec.data.col(s * factor);
  rec.data = std::move(data);
  rec.fs_hz /= factor;
  std::vector<Marker> kept;
  for (auto m : rec.markers) {
    m.sample_index /= f;
    if (m.sample_index < static_cast<std::size_t>(n_out)) kept.push_back(std::move(m));
  }
  rec.markers = std::move(kept);
  return rec;
}

inline std::size_t seconds_to_samples(double seconds, double fs_hz) {
  return static_cast<std::size_t>(std::llround(seconds * fs_hz));
}

/// Cuts [cue + t0, cue + t1) around every CueOnset marker.
inline TrialSet epoch(const Recording& rec, double t0_s, double t1_s) {
  if (!(t1_s > t0_s)) fail(ErrorKind::WindowOutOfRange, "epoch window must satisfy t0 < t1");
  TrialSet out;
  out.channel_labels = rec.labels;
  out.modality = rec.modality;
  const auto length = static_cast<Eigen::Index>(seconds_to_samples(t1_s - t0_s, rec.fs_hz));
  const long long offset = std::llround(t0_s * rec.fs_hz);
  for (const auto& m : rec.markers) {
    if (m.kind != MarkerKind::CueOnset) continue;
    const long long start = static_cast<long long>(m.sample_index) + offset;
    if (start < 0 || start + length > static_cast<long long>(rec.n_samples()))
      fail(ErrorKind::WindowOutOfRange, "epoch around cue at sample " + std::to_string(m.sample_index) +
                                            " leaves the recording");
    TrialEpoch e;
    e.class_id = *m.class_id;
    e.fs_hz = rec.fs_hz;
    e.t0_offset_s = static_cast<double>(offset) / rec.fs_hz;
    e.data = rec.data.middleCols(static_cast<Eigen::Index>(start), length);
    out.epochs.push_back(std::move(e));
  }
  return out;
}

}  // namespace grasp
