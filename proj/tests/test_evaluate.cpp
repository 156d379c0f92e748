#include <gtest/gtest.h>

#include <limits>

#include "grasp/evaluate.hpp"
#include "grasp/synth.hpp"

using namespace grasp;

namespace {

Recording session(std::uint64_t seed, int per_class, double snr_db) {
  SynthSpec s;
  s.seed = seed;
  s.trials_per_class = per_class;
  s.snr_db = snr_db;
  return gen_session(s).recording;
}

PipelineConfig conventional() { return PipelineConfig{}; }

PipelineConfig proposed() {
  PipelineConfig p;
  p.name = "proposed";
  p.gated = true;
  return p;
}

bool same_model(const OvrModel& a, const OvrModel& b) {
  if (a.per_class.size() != b.per_class.size()) return false;
  for (std::size_t k = 0; k < a.per_class.size(); ++k) {
    if (a.per_class[k].csp.filters != b.per_class[k].csp.filters) return false;
    if (a.per_class[k].lda.w != b.per_class[k].lda.w || a.per_class[k].lda.b != b.per_class[k].lda.b) return false;
  }
  return true;
}

}  // namespace

TEST(RunCv, NoiselessCeiling) {
  const Recording rec = session(8, 20, std::numeric_limits<double>::infinity());
  const auto report = run_cv(rec, conventional(), plan_for(rec, 5, 2, 1));
  EXPECT_GE(report.mean, 0.99);
  EXPECT_EQ(report.per_cell.size(), 2u);
  EXPECT_EQ(report.per_cell[0].size(), 5u);
  std::size_t total = 0;
  for (const auto& row : report.confusion)
    for (auto n : row) total += n;
  EXPECT_EQ(total, 2u * 100u);
}

TEST(RunCv, ShuffledLabelsAtChance) {
  const Recording rec = gen_label_shuffle(session(9, 20, std::numeric_limits<double>::infinity()), 99);
  const auto report = run_cv(rec, conventional(), plan_for(rec, 10, 4, 3));
  EXPECT_GE(report.mean, 0.12);
  EXPECT_LE(report.mean, 0.28);
}

TEST(RunCv, ByteIdenticalReports) {
  const Recording rec = session(10, 10, 0.0);
  const auto plan = plan_for(rec, 5, 2, 4);
  const auto a = to_json(run_cv(rec, proposed(), plan)).dump();
  const auto b = to_json(run_cv(rec, proposed(), plan)).dump();
  EXPECT_EQ(a, b);
}

TEST(RunCv, ErrorsNameTheCell) {
  const Recording rec = session(11, 10, 0.0);
  PipelineConfig bad = conventional();
  bad.decoder.csp_pairs = 40;
  try {
    run_cv(rec, bad, plan_for(rec, 5, 1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
    EXPECT_NE(std::string(e.what()).find("repetition 0, fold 0"), std::string::npos);
  }
}

TEST(RunCv, NoLeakageFromTestTrials) {
  const Recording rec = session(12, 10, 0.0);
  const PipelineConfig cfg = proposed();
  const TrialSet epochs = pipeline_epochs(preprocess_recording(rec, cfg), cfg);
  const FoldPlan plan = stratified_folds(epochs.labels(), 5, 1, 7);
  const auto ctx = build_cv_context(epochs, cfg, CspLdaBackend{cfg.decoder});
  const auto train = plan.train_indices(0, 2);
  const auto test = plan.test_indices(0, 2);
  const std::uint64_t inner = cell_seed(plan.seed, 0, 2);
  const auto full = fit_cell(ctx, train, inner);

  for (std::size_t drop : {test.front(), test.back()}) {
    TrialSet fewer = epochs;
    fewer.epochs.erase(fewer.epochs.begin() + static_cast<std::ptrdiff_t>(drop));
    const auto ctx2 = build_cv_context(fewer, cfg, CspLdaBackend{cfg.decoder});
    std::vector<std::size_t> train2;
    for (std::size_t i : train) train2.push_back(i < drop ? i : i - 1);
    const auto refit = fit_cell(ctx2, train2, inner);
    EXPECT_EQ(refit.length_s, full.length_s);
    EXPECT_TRUE(same_model(refit.model, full.model));
  }
}

TEST(ComparePipelines, DegenerateGateEqualsFixedWindow) {
  const Recording rec = session(13, 10, 0.0);
  PipelineConfig prop = proposed();
  prop.gating.fixed_onset_s = 0.0;
  prop.gating.segment_lengths = {4.0};
  const auto report = compare_pipelines(rec, conventional(), prop, plan_for(rec, 5, 2, 5));
  EXPECT_EQ(report.delta_mean, 0.0);
  EXPECT_EQ(report.conventional.per_cell, report.proposed.per_cell);
}

TEST(ComparePipelines, SharedPlanAndConsistentReports) {
  const Recording rec = session(14, 10, 0.0);
  for (std::uint64_t seed : {1u, 2u}) {
    const auto plan = plan_for(rec, 5, 2, seed);
    const auto r = compare_pipelines(rec, conventional(), proposed(), plan);
    EXPECT_DOUBLE_EQ(r.delta_mean, r.proposed.mean - r.conventional.mean);
    for (const CvReport* cv : {&r.conventional, &r.proposed}) {
      EXPECT_EQ(cv->seed, seed);
      EXPECT_EQ(cv->n_trials, 50u);
      const auto s = summarize(cv->cells());
      EXPECT_DOUBLE_EQ(s.mean, cv->mean);
      EXPECT_DOUBLE_EQ(s.std, cv->std);
    }
    EXPECT_EQ(r.proposed.chosen_segment_length_s.size(), 2u);
    EXPECT_TRUE(r.conventional.chosen_segment_length_s.empty());
  }
}

TEST(Summarize, SampleStd) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
}
