#pragma once

// Deterministic synthetic EEG+EMG sessions with known ground truth. Each
// trial carries a class-specific spatial pattern driven by band-limited,
// amplitude-modulated noise inside a jittered active window, and an EMG burst
// that starts exactly at the same onset.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasp/error.hpp"
#include "grasp/filter.hpp"
#include "grasp/folds.hpp"
#include "grasp/preprocess.hpp"
#include "grasp/types.hpp"

namespace grasp {

struct SynthSpec {
  int n_classes = kNumClasses;
  int trials_per_class = 50;
  double fs_hz = 1000.0;
  double trial_len_s = 4.0;
  int n_eeg_channels = 20;
  /// One unit-norm pattern per class; empty draws random patterns from the seed.
  std::vector<Eigen::VectorXd> patterns;
  double active_window_s = 1.0;
  double onset_jitter_lo_s = 0.3;
  double onset_jitter_hi_s = 2.5;
  /// Source power over total background noise power across EEG channels.
  /// +infinity switches the EEG background noise off. The default puts the
  /// fixed 0-4 s pipeline at roughly 0.5-0.6 accuracy.
  double snr_db = -25.75;
  double signal_rms_uv = 10.0;
  double source_lo_hz = 8.0;
  double source_hi_hz = 24.0;
  double emg_snr_db = 10.0;
  double emg_noise_uv = 5.0;
  double emg_burst_s = 1.0;
  double emg_lo_hz = 60.0;
  double emg_hi_hz = 200.0;
  double lead_in_s = 1.5;
  double rest_s = 1.5;
  std::string emg_label = "EMG";
  std::optional<std::uint64_t> seed;

  void validate() const {
    auto bad = [](const std::string& why) { fail(ErrorKind::InvalidSpec, why); };
    if (!seed) bad("seed is mandatory");
    if (n_classes != kNumClasses) bad("n_classes must be 5");
    if (trials_per_class < 1) bad("trials_per_class must be positive");
    if (!(fs_hz > 0)) bad("fs_hz must be positive");
    if (!(trial_len_s > 0)) bad("trial_len_s must be positive");
    if (n_eeg_channels < 2) bad("need at least two EEG channels");
    if (!(active_window_s > 0)) bad("active_window_s must be positive");
    if (!(onset_jitter_lo_s >= 0) || onset_jitter_hi_s < onset_jitter_lo_s) bad("onset jitter range is invalid");
    if (onset_jitter_hi_s + active_window_s > trial_len_s + 1e-12) bad("onset + active window exceeds the trial");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) bad("snr_db must be finite or +inf");
    if (!std::isfinite(emg_snr_db)) bad("emg_snr_db must be finite");
    if (!(source_lo_hz > 0) || !(source_hi_hz > source_lo_hz) || !(source_hi_hz < fs_hz / 2))
      bad("source band must lie in (0, fs/2)");
    if (!(emg_lo_hz > 0) || !(emg_lo_hz < 0.45 * fs_hz)) bad("EMG band must start below 0.45 fs");
    if (!(lead_in_s >= 0) || !(rest_s >= 0)) bad("lead-in and rest must be non-negative");
    if (!patterns.empty()) {
      if (patterns.size() != static_cast<std::size_t>(n_classes)) bad("one pattern per class required");
      for (const auto& p : patterns)
        if (p.size() != n_eeg_channels || std::abs(p.norm() - 1.0) > 1e-9) bad("patterns must be unit-norm, one entry per channel");
    }
  }
};

struct TrialTruth {
  std::size_t index = 0;
  int class_id = 0;
  std::size_t cue_sample = 0;
  /// Onset relative to the cue, seconds; the EMG burst starts exactly here.
  double onset_s = 0.0;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  std::vector<Eigen::VectorXd> patterns;
  std::vector<TrialTruth> trials;
  double active_window_s = 0.0;
};

struct SynthSession {
  Recording recording;
  GroundTruth truth;
};

namespace detail {

inline std::vector<std::string> synth_eeg_labels(int n) {
  if (n == static_cast<int>(motor_channels().size())) return motor_channels();
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("E" + std::to_string(i + 1));
  return out;
}

/// Unit-variance white noise through a band-pass, with a settling margin
/// discarded so the returned block has no start-up transient.
inline std::vector<double> band_noise(std::mt19937_64& rng, std::size_t n, double lo_hz, double hi_hz, double fs_hz) {
  const auto cascade = filter::butterworth_bandpass(4, lo_hz, std::min(hi_hz, 0.45 * fs_hz), fs_hz);
  const std::size_t margin = static_cast<std::size_t>(std::ceil(fs_hz / lo_hz)) * 4;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n + margin);
  for (auto& v : x) v = gauss(rng);
  filter::run_cascade(cascade, x);
  return {x.begin() + static_cast<std::ptrdiff_t>(margin), x.end()};
}

inline void scale_to_rms(std::vector<double>& x, double rms) {
  double p = 0.0;
  for (double v : x) p += v * v;
  p /= static_cast<double>(x.size());
  const double g = p > 0 ? rms / std::sqrt(p) : 0.0;
  for (auto& v : x) v *= g;
}

}  // namespace detail

inline SynthSession gen_session(const SynthSpec& spec) {
  spec.validate();
  const std::uint64_t seed = *spec.seed;
  const double fs = spec.fs_hz;
  const int n_eeg = spec.n_eeg_channels;
  const int n_trials = spec.n_classes * spec.trials_per_class;

  SynthSession out;
  out.truth.seed = seed;
  out.truth.active_window_s = spec.active_window_s;
  out.truth.patterns = spec.patterns;
  if (out.truth.patterns.empty()) {
    auto rng = seeded_rng(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < spec.n_classes; ++k) {
      Eigen::VectorXd p(n_eeg);
      for (int c = 0; c < n_eeg; ++c) p(c) = gauss(rng);
      out.truth.patterns.push_back(p.normalized());
    }
  }

  std::vector<int> order;
  for (int k = 0; k < spec.n_classes; ++k)
    for (int t = 0; t < spec.trials_per_class; ++t) order.push_back(k);
  {
    auto rng = seeded_rng(seed, 1);
    std::shuffle(order.begin(), order.end(), rng);
  }

  const std::size_t lead = seconds_to_samples(spec.lead_in_s, fs);
  const std::size_t trial_n = seconds_to_samples(spec.trial_len_s, fs);
  const std::size_t period = trial_n + seconds_to_samples(spec.rest_s, fs);
  const std::size_t total = lead + period * static_cast<std::size_t>(n_trials);

  const double noise_sd = std::isinf(spec.snr_db)
                              ? 0.0
                              : spec.signal_rms_uv / std::sqrt(n_eeg * std::pow(10.0, spec.snr_db / 10.0));
  const double burst_rms = spec.emg_noise_uv * std::sqrt(std::pow(10.0, spec.emg_snr_db / 10.0));

  Recording& rec = out.recording;
  rec.fs_hz = fs;
  rec.labels = detail::synth_eeg_labels(n_eeg);
  rec.labels.push_back(spec.emg_label);
  rec.modality.assign(static_cast<std::size_t>(n_eeg), Modality::EEG);
  rec.modality.push_back(Modality::EMG);
  rec.data = SignalMatrix::Zero(n_eeg + 1, static_cast<Eigen::Index>(total));

  // Background noise: the lead-in and each trial period own a substream.
  auto fill_noise = [&](std::mt19937_64& rng, std::size_t from, std::size_t count) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t s = from; s < from + count; ++s) {
      for (int c = 0; c < n_eeg; ++c) rec.data(c, static_cast<Eigen::Index>(s)) = noise_sd * gauss(rng);
      rec.data(n_eeg, static_cast<Eigen::Index>(s)) = spec.emg_noise_uv * gauss(rng);
    }
  };
  {
    auto rng = seeded_rng(seed, 2);
    fill_noise(rng, 0, lead);
  }

  const std::size_t active_n = seconds_to_samples(spec.active_window_s, fs);
  const std::size_t burst_n = std::min(seconds_to_samples(spec.emg_burst_s, fs), trial_n);
  for (int t = 0; t < n_trials; ++t) {
    auto rng = seeded_rng(seed, 1000 + static_cast<std::uint64_t>(t));
    const std::size_t cue = lead + period * static_cast<std::size_t>(t);
    fill_noise(rng, cue, period);

    std::uniform_real_distribution<double> jitter(spec.onset_jitter_lo_s, spec.onset_jitter_hi_s);
    const std::size_t onset_n = seconds_to_samples(jitter(rng), fs);
    const int k = order[static_cast<std::size_t>(t)];

    // Class source: band-limited noise, slow sinusoidal amplitude modulation,
    // short raised-cosine edges, then scaled to the target RMS.
    auto source = detail::band_noise(rng, active_n, spec.source_lo_hz, spec.source_hi_hz, fs);
    std::uniform_real_distribution<double> mod_f(1.0, 3.0), mod_phase(0.0, 2.0 * std::numbers::pi);
    const double fm = mod_f(rng), phase = mod_phase(rng);
    const std::size_t ramp = std::min(active_n / 2, seconds_to_samples(0.05, fs));
    for (std::size_t i = 0; i < active_n; ++i) {
      double env = 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * fm * static_cast<double>(i) / fs + phase);
      if (i < ramp) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(ramp));
      if (active_n - 1 - i < ramp)
        env *= 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(active_n - 1 - i) / static_cast<double>(ramp));
      source[i] *= env;
    }
    detail::scale_to_rms(source, spec.signal_rms_uv);
    const auto& pattern = out.truth.patterns[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < active_n; ++i)
      rec.data.col(static_cast<Eigen::Index>(cue + onset_n + i)).head(n_eeg) += pattern * source[i];

    auto burst = detail::band_noise(rng, burst_n, spec.emg_lo_hz, spec.emg_hi_hz, fs);
    detail::scale_to_rms(burst, burst_rms);
    const std::size_t burst_end = std::min(onset_n + burst_n, trial_n);
    for (std::size_t i = onset_n; i < burst_end; ++i)
      rec.data(n_eeg, static_cast<Eigen::Index>(cue + i)) += burst[i - onset_n];

    rec.markers.push_back({MarkerKind::CueOnset, k, cue, "S  " + std::to_string(k + 1)});
    rec.markers.push_back({MarkerKind::RestOnset, std::nullopt, cue + trial_n, "R  1"});
    out.truth.trials.push_back({static_cast<std::size_t>(t), k, cue, static_cast<double>(onset_n) / fs});
  }
  rec.validate();
  return out;
}

/// Reassigns cue labels: cue i receives the label of cue perm[i].
inline Recording permute_labels(Recording rec, const std::vector<std::size_t>& perm) {
  std::vector<Marker*> cues;
  for (auto& m : rec.markers)
    if (m.kind == MarkerKind::CueOnset) cues.push_back(&m);
  if (perm.size() != cues.size()) fail(ErrorKind::ShapeMismatch, "permutation size differs from cue count");
  std::vector<int> original;
  for (const auto* m : cues) original.push_back(*m->class_id);
  for (std::size_t i = 0; i < cues.size(); ++i) {
    cues[i]->class_id = original.at(perm[i]);
    cues[i]->description = "S  " + std::to_string(*cues[i]->class_id + 1);
  }
  return rec;
}

/// Uniformly random, seeded relabelling of the cues; signals untouched.
inline Recording gen_label_shuffle(const Recording& rec, std::uint64_t seed) {
  std::size_t n = 0;
  for (const auto& m : rec.markers) n += m.kind == MarkerKind::CueOnset ? 1 : 0;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  auto rng = seeded_rng(seed, 7);
  std::shuffle(perm.begin(), perm.end(), rng);
  return permute_labels(rec, perm);
}

inline nlohmann::json to_json(const GroundTruth& gt) {
  nlohmann::json j;
  j["seed"] = gt.seed;
  j["active_window_s"] = gt.active_window_s;
  auto& pats = j["patterns"] = nlohmann::json::array();
  for (const auto& p : gt.patterns) pats.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  auto& trials = j["trials"] = nlohmann::json::array();
  for (const auto& t : gt.trials)
    trials.push_back({{"index", t.index}, {"class_id", t.class_id}, {"cue_sample", t.cue_sample}, {"onset_s", t.onset_s}});
  return j;
}

}  // namespace grasp
