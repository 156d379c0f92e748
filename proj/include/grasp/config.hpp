#pragma once

// Run configuration: one JSON document with a section per stage. Unknown keys
// are rejected so typos fail before any work starts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "grasp/error.hpp"
#include "grasp/evaluate.hpp"
#include "grasp/io/brainvision.hpp"
#include "grasp/io/session_bundle.hpp"
#include "grasp/synth.hpp"

namespace grasp {

struct InputSpec {
  std::filesystem::path path;
  std::string subject = "Sub 1";
  std::string paradigm = "ME";
};

struct EvalConfig {
  int folds = 10;
  int repetitions = 10;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::vector<InputSpec> inputs;
  std::filesystem::path out_dir = "out";
  io::MarkerMap markers;
  std::set<std::string> emg_channels;
  PreprocessConfig preprocess;
  GatingConfig gating;
  DecoderConfig decoder;
  EvalConfig eval;
  SynthSpec synth;

  PipelineConfig conventional() const {
    PipelineConfig p;
    p.name = "conventional";
    p.preprocess = preprocess;
    p.decoder = decoder;
    p.gating = gating;
    return p;
  }

  PipelineConfig proposed() const {
    PipelineConfig p = conventional();
    p.name = "proposed";
    p.gated = true;
    return p;
  }
};

/// Default cue mapping: stimulus codes "S  1" .. "S  5" -> classes 0..4.
inline io::MarkerMap default_marker_map() {
  io::MarkerMap m;
  for (int k = 0; k < kNumClasses; ++k) m.cues["S  " + std::to_string(k + 1)] = k;
  m.rest = {"R  1"};
  return m;
}

namespace detail {

class Section {
 public:
  Section(const nlohmann::json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) fail(ErrorKind::InvalidConfig, "section '" + name_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::InvalidConfig, name_ + "." + key + " has the wrong type");
    }
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(ErrorKind::InvalidConfig, "unknown key '" + name_ + "." + k + "'");
  }

 private:
  const nlohmann::json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidConfig, what);
}

}  // namespace detail

/// Semantic checks shared by every command.
inline void validate(const RunConfig& c) {
  using detail::check;
  const auto& p = c.preprocess;
  check(p.band_lo_hz > 0 && p.band_hi_hz > p.band_lo_hz, "preprocess band must satisfy 0 < lo < hi");
  check(p.filter_order >= 2 && p.filter_order % 2 == 0, "preprocess.filter_order must be even and >= 2");
  check(p.notch_hz <= 0 || p.notch_bw_hz > 0, "preprocess.notch_bw_hz must be positive");
  check(p.epoch_t1_s > p.epoch_t0_s, "preprocess epoch window is empty");
  check(p.downsample_factor >= 1, "preprocess.downsample_factor must be >= 1");
  const auto& g = c.gating;
  check(g.rms_win_s > 0 && g.rms_hop_s > 0, "gating RMS window and hop must be positive");
  check(g.threshold.baseline_end_s > g.threshold.baseline_start_s, "gating baseline window is empty");
  check(g.threshold.k_sigma > 0, "gating k_sigma must be positive");
  check(g.threshold.min_hold_s >= 0, "gating min_hold_s must be >= 0");
  check(g.inner_folds >= 2, "gating.inner_folds must be >= 2");
  normalized_candidates(g.segment_lengths, {p.epoch_t0_s, p.epoch_t1_s});
  check(c.decoder.csp_pairs >= 1, "csp.pairs must be >= 1");
  check(c.decoder.csp_shrinkage >= 0 && c.decoder.csp_shrinkage <= 1, "csp.shrinkage must lie in [0, 1]");
  check(c.decoder.lda_shrinkage >= 0 && c.decoder.lda_shrinkage <= 1, "lda.shrinkage must lie in [0, 1]");
  check(c.eval.folds >= 2 && c.eval.repetitions >= 1, "eval needs folds >= 2 and repetitions >= 1");
  check(!c.markers.cues.empty(), "marker map has no cue codes");
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  c.markers = default_marker_map();
  detail::Section root(j, "config");
  nlohmann::json empty = nlohmann::json::object();
  auto section = [&](const char* name) -> const nlohmann::json& {
    nlohmann::json sink;
    root.get(name, sink);
    return j.contains(name) ? j.at(name) : empty;
  };

  {
    detail::Section s(section("input"), "input");
    nlohmann::json paths = nlohmann::json::array();
    std::optional<std::map<std::string, int>> cues;
    std::optional<std::vector<std::string>> rest;
    s.get("sessions", paths);
    s.get("cue_markers", cues);
    s.get("rest_markers", rest);
    s.get("emg_channels", c.emg_channels);
    s.finish();
    if (cues) c.markers.cues = *cues;
    if (rest) c.markers.rest = {rest->begin(), rest->end()};
    detail::check(paths.is_array(), "input.sessions must be an array");
    for (const auto& item : paths) {
      InputSpec in;
      std::string path;
      detail::Section si(item, "input.sessions[]");
      si.get("path", path);
      si.get("subject", in.subject);
      si.get("paradigm", in.paradigm);
      si.finish();
      detail::check(!path.empty(), "input.sessions[].path is required");
      in.path = path;
      c.inputs.push_back(in);
    }
  }
  {
    detail::Section s(section("output"), "output");
    std::string dir = c.out_dir.string();
    s.get("dir", dir);
    s.finish();
    c.out_dir = dir;
  }
  {
    auto& p = c.preprocess;
    detail::Section s(section("preprocess"), "preprocess");
    s.get("band_lo_hz", p.band_lo_hz);
    s.get("band_hi_hz", p.band_hi_hz);
    s.get("notch_hz", p.notch_hz);
    s.get("notch_bw_hz", p.notch_bw_hz);
    s.get("filter_order", p.filter_order);
    s.get("channels", p.channels);
    s.get("epoch_t0_s", p.epoch_t0_s);
    s.get("epoch_t1_s", p.epoch_t1_s);
    s.get("downsample_factor", p.downsample_factor);
    s.finish();
  }
  {
    auto& g = c.gating;
    detail::Section s(section("gating"), "gating");
    s.get("emg_channel", g.emg_channel);
    s.get("rms_win_s", g.rms_win_s);
    s.get("rms_hop_s", g.rms_hop_s);
    s.get("baseline_start_s", g.threshold.baseline_start_s);
    s.get("baseline_end_s", g.threshold.baseline_end_s);
    s.get("k_sigma", g.threshold.k_sigma);
    s.get("min_hold_s", g.threshold.min_hold_s);
    s.get("segment_lengths", g.segment_lengths);
    s.get("inner_folds", g.inner_folds);
    s.get("fixed_onset_s", g.fixed_onset_s);
    s.finish();
  }
  {
    detail::Section s(section("csp"), "csp");
    s.get("pairs", c.decoder.csp_pairs);
    s.get("shrinkage", c.decoder.csp_shrinkage);
    s.get("log_epsilon", c.decoder.log_epsilon);
    s.finish();
  }
  {
    detail::Section s(section("lda"), "lda");
    s.get("shrinkage", c.decoder.lda_shrinkage);
    s.finish();
  }
  {
    detail::Section s(section("eval"), "eval");
    s.get("folds", c.eval.folds);
    s.get("repetitions", c.eval.repetitions);
    s.get("seed", c.eval.seed);
    s.finish();
  }
  {
    auto& y = c.synth;
    detail::Section s(section("synth"), "synth");
    std::optional<std::vector<double>> jitter;
    std::optional<std::vector<std::vector<double>>> patterns;
    s.get("trials_per_class", y.trials_per_class);
    s.get("fs_hz", y.fs_hz);
    s.get("trial_len_s", y.trial_len_s);
    s.get("n_eeg_channels", y.n_eeg_channels);
    s.get("patterns", patterns);
    s.get("active_window_s", y.active_window_s);
    s.get("onset_jitter_s", jitter);
    s.get("snr_db", y.snr_db);
    s.get("signal_rms_uv", y.signal_rms_uv);
    s.get("emg_snr_db", y.emg_snr_db);
    s.get("emg_noise_uv", y.emg_noise_uv);
    s.get("emg_burst_s", y.emg_burst_s);
    s.get("lead_in_s", y.lead_in_s);
    s.get("rest_s", y.rest_s);
    s.get("seed", y.seed);
    s.finish();
    if (jitter) {
      detail::check(jitter->size() == 2, "synth.onset_jitter_s must be [lo, hi]");
      y.onset_jitter_lo_s = (*jitter)[0];
      y.onset_jitter_hi_s = (*jitter)[1];
    }
    if (patterns)
      for (const auto& p : *patterns) y.patterns.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
  }
  root.finish();
  validate(c);
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::detail::read_file(path, false));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

/// BrainVision header (.vhdr) or session-bundle manifest (.json).
inline Recording load_recording(const std::filesystem::path& path, const RunConfig& cfg) {
  if (!std::filesystem::exists(path)) fail(ErrorKind::IoFailure, "input not found: " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".vhdr") return io::load_brainvision(path, cfg.markers, cfg.emg_channels);
  if (ext == ".json") return io::load_session_bundle(path);
  fail(ErrorKind::UnsupportedFormat, path.string() + ": expected a .vhdr header or a .json bundle manifest");
}

}  // namespace grasp
