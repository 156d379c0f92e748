#include <gtest/gtest.h>

#include <limits>
#include <numbers>

#include "grasp/preprocess.hpp"
#include "grasp/synth.hpp"

using namespace grasp;

namespace {

SynthSpec spec(std::uint64_t seed, int per_class = 10, double snr = 0.0) {
  SynthSpec s;
  s.seed = seed;
  s.trials_per_class = per_class;
  s.snr_db = snr;
  return s;
}

ErrorKind kind_of(const SynthSpec& s) {
  try {
    gen_session(s);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoFailure;
}

}  // namespace

TEST(GenSession, DeterministicPerSeed) {
  const auto a = gen_session(spec(1)), b = gen_session(spec(1)), c = gen_session(spec(2));
  EXPECT_EQ(a.recording, b.recording);
  EXPECT_FALSE(a.recording == c.recording);
}

TEST(GenSession, DefaultCounts) {
  const auto s = gen_session(spec(3, 50));
  EXPECT_EQ(cue_histogram(s.recording).size(), 5u);
  for (const auto& [k, n] : cue_histogram(s.recording)) EXPECT_EQ(n, 50u);
  std::size_t cues = 0;
  for (const auto& m : s.recording.markers) cues += m.kind == MarkerKind::CueOnset ? 1 : 0;
  EXPECT_EQ(cues, 250u);
  EXPECT_EQ(s.recording.n_channels(), 21u);
  EXPECT_EQ(s.recording.modality.back(), Modality::EMG);
  EXPECT_DOUBLE_EQ(s.recording.fs_hz, 1000.0);
  for (const auto& t : s.truth.trials) {
    EXPECT_GE(t.onset_s, 0.3);
    EXPECT_LE(t.onset_s, 2.5);
  }
}

TEST(GenSession, InvalidSpecs) {
  SynthSpec s = spec(1);
  s.seed.reset();
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);
  s = spec(1);
  s.onset_jitter_hi_s = 3.5;
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);
  s = spec(1);
  s.snr_db = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);
  s = spec(1);
  s.patterns.assign(5, Eigen::VectorXd::Ones(20));
  EXPECT_EQ(kind_of(s), ErrorKind::InvalidSpec);
}

TEST(GenSession, NoiselessPatternsAreTopEigenvectors) {
  const auto s = gen_session(spec(4, 10, std::numeric_limits<double>::infinity()));
  const double fs = s.recording.fs_hz;
  std::vector<Eigen::MatrixXd> cov(5, Eigen::MatrixXd::Zero(20, 20));
  for (const auto& t : s.truth.trials) {
    const auto start = static_cast<Eigen::Index>(t.cue_sample + seconds_to_samples(t.onset_s, fs));
    const Eigen::MatrixXd x = s.recording.data.block(0, start, 20, static_cast<Eigen::Index>(fs * s.truth.active_window_s));
    cov[static_cast<std::size_t>(t.class_id)] += x * x.transpose();
  }
  for (int k = 0; k < 5; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov[static_cast<std::size_t>(k)]);
    const Eigen::VectorXd top = eig.eigenvectors().col(19);
    const double cosang = std::abs(top.dot(s.truth.patterns[static_cast<std::size_t>(k)]));
    EXPECT_LT(std::acos(std::min(1.0, cosang)), 5.0 * std::numbers::pi / 180.0) << "class " << k;
  }
}

TEST(GenSession, EmgBurstStartsAtTrueOnset) {
  SynthSpec lo = spec(5), hi = spec(5);
  hi.emg_snr_db = 20.0;
  const auto a = gen_session(lo), b = gen_session(hi);
  const Eigen::RowVectorXd diff = b.recording.data.row(20) - a.recording.data.row(20);
  for (const auto& t : a.truth.trials) {
    const std::size_t onset = t.cue_sample + seconds_to_samples(t.onset_s, 1000.0);
    EXPECT_EQ(diff(static_cast<Eigen::Index>(onset - 1)), 0.0);
    EXPECT_NE(diff(static_cast<Eigen::Index>(onset)), 0.0);
  }
  // EEG untouched by the EMG setting
  EXPECT_EQ(a.recording.data.topRows(20), b.recording.data.topRows(20));
}

TEST(GenSession, ActiveWindowPowerMatchesSnr) {
  for (double snr : {0.0, 10.0}) {
    const auto s = gen_session(spec(6, 20, snr));
    const double fs = 1000.0;
    const auto trial_n = static_cast<std::size_t>(4.0 * fs);
    const auto active_n = static_cast<std::size_t>(s.truth.active_window_s * fs);
    double p_act = 0.0, p_off = 0.0;
    std::size_t n_act = 0, n_off = 0;
    for (const auto& t : s.truth.trials) {
      const std::size_t on = seconds_to_samples(t.onset_s, fs);
      for (std::size_t i = 0; i < trial_n; ++i) {
        const double p = s.recording.data.col(static_cast<Eigen::Index>(t.cue_sample + i)).head(20).squaredNorm();
        if (i >= on && i < on + active_n) {
          p_act += p;
          ++n_act;
        } else {
          p_off += p;
          ++n_off;
        }
      }
    }
    p_act /= static_cast<double>(n_act);
    p_off /= static_cast<double>(n_off);
    EXPECT_NEAR(10.0 * std::log10((p_act - p_off) / p_off), snr, 1.0);
  }
}

TEST(LabelShuffle, HistogramKeptSignalsUntouched) {
  const auto s = gen_session(spec(7));
  const Recording shuffled = gen_label_shuffle(s.recording, 11);
  EXPECT_EQ(cue_histogram(shuffled), cue_histogram(s.recording));
  EXPECT_EQ(shuffled.data, s.recording.data);
  EXPECT_EQ(gen_label_shuffle(s.recording, 11), shuffled);
  bool any_changed = false;
  for (std::size_t i = 0; i < shuffled.markers.size(); ++i)
    any_changed = any_changed || shuffled.markers[i].class_id != s.recording.markers[i].class_id;
  EXPECT_TRUE(any_changed);

  std::vector<std::size_t> identity(50);
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  EXPECT_EQ(permute_labels(s.recording, identity), s.recording);
}

TEST(GroundTruth, JsonCarriesEveryTrial) {
  const auto s = gen_session(spec(8));
  const auto j = to_json(s.truth);
  EXPECT_EQ(j["seed"], 8u);
  ASSERT_EQ(j["trials"].size(), 50u);
  EXPECT_EQ(j["trials"][3]["onset_s"].get<double>(), s.truth.trials[3].onset_s);
  EXPECT_EQ(j["patterns"].size(), 5u);
}
