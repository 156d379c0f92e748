#pragma once

// EMG-gated time-segment selection: an RMS envelope of the EMG channel is
// compared against a pre-cue baseline threshold to find when the movement
// starts, and a fixed-length EEG segment anchored at that onset is kept.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grasp/error.hpp"
#include "grasp/preprocess.hpp"
#include "grasp/types.hpp"

namespace grasp {

struct RmsEnvelope {
  std::vector<double> values;
  double hop_s = 0.0;
  double win_s = 0.0;
  /// Centre time of the first window, seconds.
  double t_first_s = 0.0;

  double center_time(std::size_t i) const { return t_first_s + static_cast<double>(i) * hop_s; }
};

struct ThresholdSpec {
  double baseline_start_s = -1.0;
  double baseline_end_s = 0.0;
  double k_sigma = 3.0;
  double min_hold_s = 0.1;

  void validate() const {
    if (!(baseline_end_s <= 0.0) || !(baseline_start_s < baseline_end_s))
      fail(ErrorKind::InvalidConfig, "baseline window must end at or before the cue and have positive length");
    if (!(k_sigma > 0.0)) fail(ErrorKind::InvalidConfig, "k_sigma must be positive");
    if (!(min_hold_s >= 0.0)) fail(ErrorKind::InvalidConfig, "min_hold_s must be non-negative");
  }
};

/// Trial time span the segment must fit into, seconds relative to the cue.
struct TrialSpan {
  double start_s = 0.0;
  double end_s = 4.0;

  double length() const { return end_s - start_s; }
};

struct GatingDecision {
  std::optional<double> onset_s;
  double start_s = 0.0;
  double end_s = 0.0;
  double length_s = 0.0;
  bool fallback_used = false;
};

struct GatingConfig {
  std::string emg_channel = "EMG";
  double rms_win_s = 0.05;
  double rms_hop_s = 0.05;
  ThresholdSpec threshold;
  std::vector<double> segment_lengths{1.0, 1.5, 2.0, 2.5};
  int inner_folds = 5;
  TrialSpan span;
  /// When set, every trial uses this onset instead of detecting one (e.g. a
  /// subject's median execution onset reused for imagery trials).
  std::optional<double> fixed_onset_s;
};

/// Sliding-window RMS. `t_start_s` is the time of the first sample.
inline RmsEnvelope rms_envelope(std::span<const double> signal, double fs_hz, double win_s, double hop_s,
                                double t_start_s = 0.0) {
  const long long win = std::llround(win_s * fs_hz);
  const long long hop = std::llround(hop_s * fs_hz);
  if (win < 1 || hop < 1) fail(ErrorKind::WindowTooLarge, "RMS window and hop must span at least one sample");
  if (static_cast<std::size_t>(win) > signal.size())
    fail(ErrorKind::WindowTooLarge, "RMS window longer than the signal");

  RmsEnvelope env;
  env.win_s = static_cast<double>(win) / fs_hz;
  env.hop_s = static_cast<double>(hop) / fs_hz;
  env.t_first_s = t_start_s + env.win_s / 2.0;
  const std::size_t count = (signal.size() - static_cast<std::size_t>(win)) / static_cast<std::size_t>(hop) + 1;
  env.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto w = signal.subspan(i * static_cast<std::size_t>(hop), static_cast<std::size_t>(win));
    double acc = 0.0;
    for (double v : w) acc += v * v;
    env.values.push_back(std::sqrt(acc / static_cast<double>(win)));
  }
  return env;
}

/// mean + k_sigma * std of the baseline envelope (sample std).
inline double onset_threshold(const RmsEnvelope& baseline, double k_sigma) {
  if (baseline.values.empty()) fail(ErrorKind::EmptyBaseline, "baseline envelope is empty");
  const auto n = static_cast<double>(baseline.values.size());
  double mean = 0.0;
  for (double v : baseline.values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : baseline.values) ss += (v - mean) * (v - mean);
  const double sd = baseline.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return mean + k_sigma * sd;
}

/// Windows a supra-threshold run must contain to last min_hold_s.
inline std::size_t hold_windows(double min_hold_s, double hop_s) {
  const double w = std::ceil(min_hold_s / hop_s - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, w));
}

/// Centre time of the first window that opens a run of consecutive
/// supra-threshold windows lasting at least min_hold_s.
inline std::optional<double> detect_onset(const RmsEnvelope& env, const RmsEnvelope& baseline,
                                          const ThresholdSpec& spec) {
  const double theta = onset_threshold(baseline, spec.k_sigma);
  const std::size_t need = hold_windows(spec.min_hold_s, env.hop_s);
  std::size_t run = 0;
  for (std::size_t i = 0; i < env.values.size(); ++i) {
    run = env.values[i] > theta ? run + 1 : 0;
    if (run >= need) return env.center_time(i + 1 - run);
  }
  return std::nullopt;
}

/// Segment of length_s anchored at the onset and shifted left just enough to
/// fit the trial span; [span.start, span.start + length] when no onset.
inline GatingDecision select_segment(std::optional<double> onset_s, double length_s, TrialSpan span = {}) {
  if (!(length_s > 0.0) || length_s > span.length() + 1e-12)
    fail(ErrorKind::BadLength, "segment length " + std::to_string(length_s) + " s outside (0, trial length]");
  GatingDecision d;
  d.onset_s = onset_s;
  d.length_s = length_s;
  if (onset_s) {
    d.start_s = std::max(span.start_s, std::min(*onset_s, span.end_s - length_s));
  } else {
    d.start_s = span.start_s;
    d.fallback_used = true;
  }
  d.end_s = d.start_s + length_s;
  return d;
}

/// Per-trial onset detection on the EMG channel of epochs that include the
/// baseline window. Independent of segment length, so it runs once per set.
inline std::vector<std::optional<double>> detect_trial_onsets(const TrialSet& epochs, const GatingConfig& cfg) {
  if (cfg.fixed_onset_s) return std::vector<std::optional<double>>(epochs.size(), cfg.fixed_onset_s);
  cfg.threshold.validate();
  const auto ch = epochs.channel_index(cfg.emg_channel);
  if (!ch) fail(ErrorKind::UnknownChannel, "EMG channel '" + cfg.emg_channel + "' not in trial set");
  if (epochs.modality[*ch] != Modality::EMG)
    fail(ErrorKind::UnknownChannel, "channel '" + cfg.emg_channel + "' is not tagged EMG");

  std::vector<std::optional<double>> onsets;
  onsets.reserve(epochs.size());
  for (const auto& e : epochs.epochs) {
    const auto row = e.data.row(static_cast<Eigen::Index>(*ch));
    const std::span<const double> emg(row.data(), e.n_samples());
    auto index_of = [&](double t) { return std::llround((t - e.t0_offset_s) * e.fs_hz); };
    const long long b0 = index_of(cfg.threshold.baseline_start_s);
    const long long b1 = index_of(cfg.threshold.baseline_end_s);
    const long long t0 = index_of(cfg.span.start_s);
    const long long t1 = index_of(cfg.span.end_s);
    if (b0 < 0 || t0 < 0 || t1 > static_cast<long long>(e.n_samples()) || b1 > static_cast<long long>(e.n_samples()))
      fail(ErrorKind::WindowOutOfRange, "epoch does not cover the baseline window and trial span");
    const auto baseline = rms_envelope(emg.subspan(static_cast<std::size_t>(b0), static_cast<std::size_t>(b1 - b0)),
                                       e.fs_hz, cfg.rms_win_s, cfg.rms_hop_s, cfg.threshold.baseline_start_s);
    const auto env = rms_envelope(emg.subspan(static_cast<std::size_t>(t0), static_cast<std::size_t>(t1 - t0)),
                                  e.fs_hz, cfg.rms_win_s, cfg.rms_hop_s, cfg.span.start_s);
    onsets.push_back(detect_onset(env, baseline, cfg.threshold));
  }
  return onsets;
}

struct GatedTrials {
  TrialSet trials;
  std::vector<GatingDecision> decisions;
};

/// EEG-only slice [segment.start, segment.end) of each epoch.
inline TrialEpoch slice_segment(const TrialEpoch& e, const std::vector<Eigen::Index>& eeg_rows, double start_s,
                                double length_s) {
  const auto count = static_cast<Eigen::Index>(seconds_to_samples(length_s, e.fs_hz));
  auto first = static_cast<Eigen::Index>(std::llround((start_s - e.t0_offset_s) * e.fs_hz));
  first = std::min(first, static_cast<Eigen::Index>(e.n_samples()) - count);
  if (first < 0 || count < 1) fail(ErrorKind::WindowOutOfRange, "segment falls outside the epoch");
  TrialEpoch out;
  out.class_id = e.class_id;
  out.fs_hz = e.fs_hz;
  out.t0_offset_s = e.t0_offset_s + static_cast<double>(first) / e.fs_hz;
  out.data.resize(static_cast<Eigen::Index>(eeg_rows.size()), count);
  for (std::size_t r = 0; r < eeg_rows.size(); ++r)
    out.data.row(static_cast<Eigen::Index>(r)) = e.data.row(eeg_rows[r]).segment(first, count);
  return out;
}

inline std::vector<Eigen::Index> eeg_rows(const TrialSet& set) {
  std::vector<Eigen::Index> rows;
  for (std::size_t c = 0; c < set.modality.size(); ++c)
    if (set.modality[c] == Modality::EEG) rows.push_back(static_cast<Eigen::Index>(c));
  return rows;
}

inline TrialSet eeg_header_of(const TrialSet& set) {
  TrialSet out;
  for (std::size_t c = 0; c < set.modality.size(); ++c) {
    if (set.modality[c] != Modality::EEG) continue;
    out.channel_labels.push_back(set.channel_labels[c]);
    out.modality.push_back(Modality::EEG);
  }
  return out;
}

inline GatedTrials gate_with_onsets(const TrialSet& epochs, std::span<const std::optional<double>> onsets,
                                    double length_s, TrialSpan span = {}) {
  if (onsets.size() != epochs.size()) fail(ErrorKind::ShapeMismatch, "one onset per epoch required");
  GatedTrials out;
  out.trials = eeg_header_of(epochs);
  const auto rows = eeg_rows(epochs);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    auto d = select_segment(onsets[i], length_s, span);
    out.trials.epochs.push_back(slice_segment(epochs.epochs[i], rows, d.start_s, d.length_s));
    out.decisions.push_back(d);
  }
  return out;
}

inline GatedTrials gate_trials(const TrialSet& epochs, const GatingConfig& cfg, double length_s) {
  const auto onsets = detect_trial_onsets(epochs, cfg);
  return gate_with_onsets(epochs, onsets, length_s, cfg.span);
}

/// Median of the detected onsets, ignoring trials without one.
inline std::optional<double> median_onset(std::span<const std::optional<double>> onsets) {
  std::vector<double> v;
  for (const auto& o : onsets)
    if (o) v.push_back(*o);
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace grasp
