#pragma once

// Repeated stratified cross-validation of the conventional (fixed window) and
// proposed (EMG-gated) pipelines under one shared fold plan.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasp/decoder.hpp"
#include "grasp/error.hpp"
#include "grasp/folds.hpp"
#include "grasp/gating.hpp"
#include "grasp/preprocess.hpp"
#include "grasp/segment_length.hpp"
#include "grasp/types.hpp"

namespace grasp {

struct PreprocessConfig {
  double band_lo_hz = 0.3;
  double band_hi_hz = 30.0;
  /// Zero or negative disables the notch.
  double notch_hz = 60.0;
  double notch_bw_hz = 2.0;
  int filter_order = 8;
  /// Empty keeps every channel.
  std::vector<std::string> channels;
  double epoch_t0_s = 0.0;
  double epoch_t1_s = 4.0;
  int downsample_factor = 1;
};

struct PipelineConfig {
  std::string name = "conventional";
  PreprocessConfig preprocess;
  bool gated = false;
  GatingConfig gating;
  DecoderConfig decoder;

  TrialSpan span() const { return {preprocess.epoch_t0_s, preprocess.epoch_t1_s}; }
};

/// Filtering, channel selection and decimation of a continuous recording.
inline Recording preprocess_recording(Recording rec, const PipelineConfig& cfg) {
  const auto& p = cfg.preprocess;
  if (!p.channels.empty()) {
    auto names = p.channels;
    if (cfg.gated && std::find(names.begin(), names.end(), cfg.gating.emg_channel) == names.end())
      names.push_back(cfg.gating.emg_channel);
    rec = select_channels(rec, names);
  }
  if (p.notch_hz > 0.0) rec = notch(std::move(rec), p.notch_hz, p.notch_bw_hz, ChannelScope::All);
  rec = bandpass(std::move(rec), p.band_lo_hz, p.band_hi_hz, p.filter_order, ChannelScope::EegOnly);
  return downsample(std::move(rec), p.downsample_factor);
}

/// Epochs wide enough for both the trial span and, when gated, the EMG baseline.
inline TrialSet pipeline_epochs(const Recording& preprocessed, const PipelineConfig& cfg) {
  double t0 = cfg.preprocess.epoch_t0_s;
  if (cfg.gated) t0 = std::min(t0, cfg.gating.threshold.baseline_start_s);
  return epoch(preprocessed, t0, cfg.preprocess.epoch_t1_s);
}

inline TrialSet fixed_window_trials(const TrialSet& epochs, TrialSpan span) {
  TrialSet out = eeg_header_of(epochs);
  const auto rows = eeg_rows(epochs);
  for (const auto& e : epochs.epochs) out.epochs.push_back(slice_segment(e, rows, span.start_s, span.length()));
  return out;
}

/// Everything a CV cell needs, computed once per dataset. Gating and the
/// per-trial preparation use no labels, so sharing them across folds leaks
/// nothing from test trials into training.
template <DecoderBackend B>
struct CvContext {
  B backend;
  /// Candidate segment lengths, ascending; one entry (the span) when not gated.
  std::vector<double> lengths;
  std::vector<std::vector<typename B::Prepared>> per_candidate;
  std::vector<int> labels;
  std::vector<std::optional<double>> onsets;
  int inner_folds = 5;
  bool gated = false;
};

template <DecoderBackend B>
CvContext<B> build_cv_context(const TrialSet& epochs, const PipelineConfig& cfg, B backend) {
  CvContext<B> ctx;
  ctx.backend = std::move(backend);
  ctx.labels = epochs.labels();
  ctx.gated = cfg.gated;
  ctx.inner_folds = cfg.gating.inner_folds;
  if (!cfg.gated) {
    ctx.lengths = {cfg.span().length()};
    ctx.per_candidate.push_back(prepare_all(ctx.backend, fixed_window_trials(epochs, cfg.span())));
    return ctx;
  }
  GatingConfig g = cfg.gating;
  g.span = cfg.span();
  ctx.lengths = normalized_candidates(g.segment_lengths, g.span);
  ctx.onsets = detect_trial_onsets(epochs, g);
  for (double l : ctx.lengths)
    ctx.per_candidate.push_back(prepare_all(ctx.backend, gate_with_onsets(epochs, ctx.onsets, l, g.span).trials));
  return ctx;
}

template <class Model>
struct CellFit {
  Model model;
  std::size_t candidate = 0;
  double length_s = 0.0;
};

/// Fits one cell from its training indices only.
template <DecoderBackend B>
CellFit<typename B::Model> fit_cell(const CvContext<B>& ctx, std::span<const std::size_t> train,
                                    std::uint64_t inner_seed) {
  std::size_t cand = 0;
  if (ctx.per_candidate.size() > 1)
    cand = best_candidate(ctx.backend, ctx.per_candidate, ctx.labels, train, ctx.inner_folds, inner_seed);
  return {ctx.backend.fit(ctx.per_candidate[cand], ctx.labels, train), cand, ctx.lengths[cand]};
}

inline std::uint64_t cell_seed(std::uint64_t seed, int rep, int fold) {
  return seeded_rng(seed, 0x100000000ULL + static_cast<std::uint64_t>(rep) * 1000ULL + static_cast<std::uint64_t>(fold))();
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and sample standard deviation.
inline Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct CvReport {
  std::string pipeline;
  int repetitions = 0;
  int folds = 0;
  std::uint64_t seed = 0;
  std::size_t n_trials = 0;
  /// repetitions x folds accuracy.
  std::vector<std::vector<double>> per_cell;
  double mean = 0.0;
  double std = 0.0;
  double gating_fallback_rate = 0.0;
  /// repetitions x folds; empty for the fixed-window pipeline.
  std::vector<std::vector<double>> chosen_segment_length_s;
  Confusion confusion = empty_confusion();

  Summary summary() const { return {mean, std}; }

  std::vector<double> cells() const {
    std::vector<double> out;
    for (const auto& row : per_cell) out.insert(out.end(), row.begin(), row.end());
    return out;
  }
};

struct ComparisonReport {
  CvReport conventional;
  CvReport proposed;
  double delta_mean = 0.0;
};

template <DecoderBackend B>
CvReport run_cv_on_epochs(const TrialSet& epochs, const PipelineConfig& cfg, const FoldPlan& plan, B backend) {
  if (epochs.empty()) fail(ErrorKind::TooFewTrials, "dataset holds no trials");
  for (const auto& a : plan.assignments)
    if (a.size() != epochs.size()) fail(ErrorKind::ShapeMismatch, "fold plan does not match the number of trials");

  const CvContext<B> ctx = build_cv_context(epochs, cfg, std::move(backend));
  CvReport rep;
  rep.pipeline = cfg.name;
  rep.repetitions = plan.repetitions;
  rep.folds = plan.folds_per_rep;
  rep.seed = plan.seed;
  rep.n_trials = epochs.size();
  if (cfg.gated) {
    std::size_t fallbacks = 0;
    for (const auto& o : ctx.onsets) fallbacks += o ? 0 : 1;
    rep.gating_fallback_rate = static_cast<double>(fallbacks) / static_cast<double>(ctx.onsets.size());
  }

  for (int r = 0; r < plan.repetitions; ++r) {
    std::vector<double> row, lens;
    for (int f = 0; f < plan.folds_per_rep; ++f) {
      try {
        const auto train = plan.train_indices(r, f);
        const auto test = plan.test_indices(r, f);
        const auto cell = fit_cell(ctx, train, cell_seed(plan.seed, r, f));
        std::size_t correct = 0;
        for (std::size_t i : test) {
          const int pred = ctx.backend.predict(cell.model, ctx.per_candidate[cell.candidate][i]);
          correct += pred == ctx.labels[i] ? 1 : 0;
          ++rep.confusion[static_cast<std::size_t>(ctx.labels[i])][static_cast<std::size_t>(pred)];
        }
        row.push_back(test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size()));
        lens.push_back(cell.length_s);
      } catch (const Error& e) {
        throw Error(e.kind(), "repetition " + std::to_string(r) + ", fold " + std::to_string(f) + ": " + e.message());
      }
    }
    rep.per_cell.push_back(std::move(row));
    if (cfg.gated) rep.chosen_segment_length_s.push_back(std::move(lens));
  }
  const auto cells = rep.cells();
  const Summary s = summarize(cells);
  rep.mean = s.mean;
  rep.std = s.std;
  return rep;
}

template <DecoderBackend B = CspLdaBackend>
CvReport run_cv(const Recording& rec, const PipelineConfig& cfg, const FoldPlan& plan, B backend) {
  const TrialSet epochs = pipeline_epochs(preprocess_recording(rec, cfg), cfg);
  return run_cv_on_epochs(epochs, cfg, plan, std::move(backend));
}

inline CvReport run_cv(const Recording& rec, const PipelineConfig& cfg, const FoldPlan& plan) {
  return run_cv(rec, cfg, plan, CspLdaBackend{cfg.decoder});
}

/// Builds the shared fold plan from the recording's cue labels.
inline FoldPlan plan_for(const Recording& rec, int folds, int reps, std::uint64_t seed) {
  std::vector<int> labels;
  for (const auto& m : rec.markers)
    if (m.kind == MarkerKind::CueOnset) labels.push_back(*m.class_id);
  return stratified_folds(labels, folds, reps, seed);
}

inline ComparisonReport compare_pipelines(const Recording& rec, const PipelineConfig& conventional,
                                          const PipelineConfig& proposed, const FoldPlan& plan) {
  ComparisonReport out;
  out.conventional = run_cv(rec, conventional, plan);
  out.proposed = run_cv(rec, proposed, plan);
  out.delta_mean = out.proposed.mean - out.conventional.mean;
  return out;
}

inline nlohmann::json to_json(const CvReport& r) {
  nlohmann::json j;
  j["pipeline"] = r.pipeline;
  j["repetitions"] = r.repetitions;
  j["folds"] = r.folds;
  j["seed"] = r.seed;
  j["n_trials"] = r.n_trials;
  j["mean"] = r.mean;
  j["std"] = r.std;
  j["gating_fallback_rate"] = r.gating_fallback_rate;
  j["per_cell"] = r.per_cell;
  j["chosen_segment_length_s"] = r.chosen_segment_length_s;
  j["confusion"] = r.confusion;
  return j;
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  return {{"conventional", to_json(r.conventional)}, {"proposed", to_json(r.proposed)}, {"delta_mean", r.delta_mean}};
}

}  // namespace grasp
