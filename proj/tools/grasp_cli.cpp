// grasp: synth | inspect | preprocess | gate | train | evaluate | compare
//
// Every command reads one JSON config (--config), validates it fully, computes
// in memory and only then writes into --out. Errors go to stderr as a single
// JSON object and the exit code is nonzero.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "grasp/grasp.hpp"

namespace fs = std::filesystem;
using namespace grasp;
using io::read_binary_file;
using io::save_session_bundle;
using io::write_file_atomic;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format = "md";
};

RunConfig load_config(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? parse_run_config(nlohmann::json::object()) : load_run_config(g.config_path);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.seed) {
    cfg.eval.seed = g.seed;
    cfg.synth.seed = g.seed;
  }
  return cfg;
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.eval.seed) fail(ErrorKind::InvalidConfig, "eval.seed is required (or pass --seed)");
  return *cfg.eval.seed;
}

/// Positional inputs replace the configured session list.
std::vector<InputSpec> resolve_inputs(const RunConfig& cfg, const std::vector<std::string>& positional) {
  std::vector<InputSpec> inputs = cfg.inputs;
  if (!positional.empty()) {
    inputs.clear();
    for (const auto& p : positional) inputs.push_back({p});
  }
  if (inputs.empty()) fail(ErrorKind::InvalidConfig, "no input sessions given");
  for (const auto& in : inputs)
    if (!fs::exists(in.path)) fail(ErrorKind::IoFailure, "input not found: " + in.path.string());
  return inputs;
}

/// Output directory plus a copy of the config that produced it.
void prepare_out(const Globals& g, const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  if (!g.config_path.empty()) {
    const auto bytes = read_binary_file(g.config_path);
    write_file_atomic(cfg.out_dir / "config.json", std::span<const std::uint8_t>(bytes));
  }
}

std::string slug(const InputSpec& in, std::size_t i) {
  std::string s = in.subject + "_" + in.paradigm;
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return std::to_string(i) + "_" + s;
}

int cmd_synth(const Globals& g) {
  const RunConfig cfg = load_config(g);
  cfg.synth.validate();
  const SynthSession session = gen_session(cfg.synth);
  prepare_out(g, cfg);
  const auto manifest = save_session_bundle(session.recording, cfg.out_dir, "session");
  write_file_atomic(cfg.out_dir / "ground_truth.json", to_json(session.truth).dump(2) + "\n");
  std::printf("wrote %s (%zu trials)\n", manifest.string().c_str(), session.truth.trials.size());
  return 0;
}

int cmd_inspect(const Globals& g, const std::string& path) {
  const RunConfig cfg = load_config(g);
  const Recording rec = load_recording(path, cfg);
  std::size_t n_emg = 0, cues = 0, rests = 0, other = 0;
  for (auto m : rec.modality) n_emg += m == Modality::EMG ? 1 : 0;
  for (const auto& m : rec.markers) {
    if (m.kind == MarkerKind::CueOnset) ++cues;
    else if (m.kind == MarkerKind::RestOnset) ++rests;
    else ++other;
  }
  std::printf("file: %s\n", path.c_str());
  std::printf("channels: %zu (%zu EEG, %zu EMG)\n", rec.n_channels(), rec.n_channels() - n_emg, n_emg);
  std::string labels;
  for (std::size_t i = 0; i < rec.labels.size(); ++i) labels += (i ? " " : "") + rec.labels[i];
  std::printf("labels: %s\n", labels.c_str());
  std::printf("fs_hz: %g\n", rec.fs_hz);
  std::printf("samples: %zu\n", rec.n_samples());
  std::printf("duration_s: %.3f\n", rec.duration_s());
  std::printf("markers: cue %zu, rest %zu, other %zu\n", cues, rests, other);
  std::printf("class histogram:");
  for (const auto& [k, n] : cue_histogram(rec)) std::printf(" %d:%zu", k, n);
  std::printf("\n");
  return 0;
}

int cmd_preprocess(const Globals& g, const std::vector<std::string>& positional) {
  const RunConfig cfg = load_config(g);
  const auto inputs = resolve_inputs(cfg, positional);
  std::vector<Recording> out;
  for (const auto& in : inputs) out.push_back(preprocess_recording(load_recording(in.path, cfg), cfg.proposed()));
  prepare_out(g, cfg);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto path = save_session_bundle(out[i], cfg.out_dir, "preprocessed_" + slug(inputs[i], i));
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

struct GateResult {
  double length_s = 0.0;
  std::vector<int> labels;
  std::vector<std::optional<double>> onsets;
  std::vector<GatingDecision> decisions;
};

int cmd_gate(const Globals& g, const std::vector<std::string>& positional) {
  const RunConfig cfg = load_config(g);
  const std::uint64_t seed = require_seed(cfg);
  const auto inputs = resolve_inputs(cfg, positional);
  const PipelineConfig pipe = cfg.proposed();
  std::vector<GateResult> results;
  for (const auto& in : inputs) {
    const TrialSet epochs = pipeline_epochs(preprocess_recording(load_recording(in.path, cfg), pipe), pipe);
    GatingConfig gc = pipe.gating;
    gc.span = pipe.span();
    GateResult r;
    r.length_s = choose_segment_length(epochs, gc, CspLdaBackend{pipe.decoder}, seed);
    r.labels = epochs.labels();
    r.onsets = detect_trial_onsets(epochs, gc);
    r.decisions = gate_with_onsets(epochs, r.onsets, r.length_s, gc.span).decisions;
    results.push_back(std::move(r));
  }
  prepare_out(g, cfg);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::ostringstream csv;
    csv << "trial,class_id,onset_s,fallback,start_s,end_s\n";
    for (std::size_t t = 0; t < r.decisions.size(); ++t) {
      const auto& d = r.decisions[t];
      csv << t << "," << r.labels[t] << "," << (r.onsets[t] ? fixed4(*r.onsets[t]) : "") << ","
          << (d.fallback_used ? 1 : 0) << "," << fixed4(d.start_s) << "," << fixed4(d.end_s) << "\n";
    }
    const auto path = cfg.out_dir / ("gating_" + slug(inputs[i], i) + ".csv");
    write_file_atomic(path, csv.str());
    std::size_t fallbacks = 0;
    for (const auto& d : r.decisions) fallbacks += d.fallback_used ? 1 : 0;
    std::printf("%s: segment length %.2f s, %zu/%zu trials without onset\n", path.string().c_str(), r.length_s,
                fallbacks, r.decisions.size());
  }
  return 0;
}

PipelineConfig pick_pipeline(const RunConfig& cfg, const std::string& name) {
  if (name == "proposed") return cfg.proposed();
  if (name == "conventional") return cfg.conventional();
  fail(ErrorKind::InvalidConfig, "unknown pipeline '" + name + "'");
}

int cmd_train(const Globals& g, const std::vector<std::string>& positional, const std::string& pipeline) {
  const RunConfig cfg = load_config(g);
  const PipelineConfig pipe = pick_pipeline(cfg, pipeline);
  const auto inputs = resolve_inputs(cfg, positional);
  if (pipe.gated) require_seed(cfg);
  std::vector<nlohmann::json> models;
  for (const auto& in : inputs) {
    const TrialSet epochs = pipeline_epochs(preprocess_recording(load_recording(in.path, cfg), pipe), pipe);
    const CspLdaBackend backend{pipe.decoder};
    TrialSet trials;
    double length = pipe.span().length();
    if (pipe.gated) {
      GatingConfig gc = pipe.gating;
      gc.span = pipe.span();
      length = choose_segment_length(epochs, gc, backend, *cfg.eval.seed);
      trials = gate_trials(epochs, gc, length).trials;
    } else {
      trials = fixed_window_trials(epochs, pipe.span());
    }
    nlohmann::json j = to_json(fit_ovr(trials, pipe.decoder));
    j["pipeline"] = pipe.name;
    j["segment_length_s"] = length;
    j["channels"] = trials.channel_labels;
    models.push_back(std::move(j));
  }
  prepare_out(g, cfg);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto path = cfg.out_dir / ("model_" + pipe.name + "_" + slug(inputs[i], i) + ".json");
    write_file_atomic(path, models[i].dump(2) + "\n");
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

int cmd_evaluate(const Globals& g, const std::vector<std::string>& positional, const std::string& pipeline) {
  const RunConfig cfg = load_config(g);
  const PipelineConfig pipe = pick_pipeline(cfg, pipeline);
  const std::uint64_t seed = require_seed(cfg);
  const auto inputs = resolve_inputs(cfg, positional);
  std::vector<CvReport> reports;
  for (const auto& in : inputs) {
    const Recording rec = load_recording(in.path, cfg);
    reports.push_back(run_cv(rec, pipe, plan_for(rec, cfg.eval.folds, cfg.eval.repetitions, seed)));
  }
  prepare_out(g, cfg);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto path = cfg.out_dir / ("cv_" + pipe.name + "_" + slug(inputs[i], i) + ".json");
    write_file_atomic(path, to_json(reports[i]).dump(2) + "\n");
    std::printf("%s %s: %s\n", inputs[i].subject.c_str(), inputs[i].paradigm.c_str(),
                format_cell(reports[i].summary()).c_str());
  }
  return 0;
}

int cmd_compare(const Globals& g, const std::vector<std::string>& positional) {
  const RunConfig cfg = load_config(g);
  const ReportFormat stdout_format = report_format_from(g.format);
  const std::uint64_t seed = require_seed(cfg);
  const auto inputs = resolve_inputs(cfg, positional);
  std::vector<TableRow> rows;
  std::string confusions;
  nlohmann::json full = nlohmann::json::array();
  for (const auto& in : inputs) {
    const Recording rec = load_recording(in.path, cfg);
    const FoldPlan plan = plan_for(rec, cfg.eval.folds, cfg.eval.repetitions, seed);
    const ComparisonReport report = compare_pipelines(rec, cfg.conventional(), cfg.proposed(), plan);
    rows.push_back(table_row(report, in.subject, in.paradigm));
    confusions += render_confusions(report, in.subject, in.paradigm);
    nlohmann::json j = to_json(report);
    j["subject"] = in.subject;
    j["paradigm"] = in.paradigm;
    full.push_back(std::move(j));
  }
  prepare_out(g, cfg);
  write_file_atomic(cfg.out_dir / "results.csv", render_table(rows, ReportFormat::Csv));
  write_file_atomic(cfg.out_dir / "report.md", render_table(rows, ReportFormat::Markdown));
  write_file_atomic(cfg.out_dir / "confusions.jsonl", confusions);
  write_file_atomic(cfg.out_dir / "comparison.json", full.dump(2) + "\n");
  std::fputs(render_table(rows, stdout_format).c_str(), stdout);
  return 0;
}

void report_error(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG+EMG grasp decoding: fixed-window vs EMG-gated CSP+LDA"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", g.seed, "seed override for synthesis and evaluation");
  app.add_option("--format", g.format, "table format on stdout")->check(CLI::IsMember({"csv", "md", "jsonl"}));

  std::vector<std::string> inputs;
  std::string inspect_path;
  std::string pipeline = "proposed";

  auto* synth = app.add_subcommand("synth", "write a synthetic session bundle and its ground truth");
  auto* inspect = app.add_subcommand("inspect", "summarize a recording");
  inspect->add_option("path", inspect_path, ".vhdr header or bundle manifest")->required();
  auto* pre = app.add_subcommand("preprocess", "filter, select channels, downsample; write bundles");
  pre->add_option("inputs", inputs, "input recordings (default: config input.sessions)");
  auto* gate = app.add_subcommand("gate", "detect EMG onsets and pick the segment length");
  gate->add_option("inputs", inputs, "input recordings");
  auto* train = app.add_subcommand("train", "fit a model on all trials");
  train->add_option("inputs", inputs, "input recordings");
  train->add_option("--pipeline", pipeline, "conventional | proposed");
  auto* evaluate = app.add_subcommand("evaluate", "repeated k-fold CV of one pipeline");
  evaluate->add_option("inputs", inputs, "input recordings");
  evaluate->add_option("--pipeline", pipeline, "conventional | proposed");
  auto* compare = app.add_subcommand("compare", "conventional vs proposed under one fold plan");
  compare->add_option("inputs", inputs, "input recordings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("UsageError", e.what());
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(g);
    if (inspect->parsed()) return cmd_inspect(g, inspect_path);
    if (pre->parsed()) return cmd_preprocess(g, inputs);
    if (gate->parsed()) return cmd_gate(g, inputs);
    if (train->parsed()) return cmd_train(g, inputs, pipeline);
    if (evaluate->parsed()) return cmd_evaluate(g, inputs, pipeline);
    if (compare->parsed()) return cmd_compare(g, inputs);
  } catch (const Error& e) {
    report_error(std::string(to_string(e.kind())), std::string(e.message()));
    return 1;
  } catch (const std::exception& e) {
    report_error("InternalError", e.what());
    return 1;
  }
  return 1;
}
