#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "grasp/types.hpp"

namespace testing_helpers {

/// Amplitude of the f_hz component of x, by direct DFT projection over a
/// whole number of cycles. Independent of anything in the library.
inline double tone_amplitude(const std::vector<double>& x, double f_hz, double fs_hz, std::size_t from, std::size_t count) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < count; ++i) {
    const double ph = 2.0 * std::numbers::pi * f_hz * static_cast<double>(i) / fs_hz;
    acc += x[from + i] * std::complex<double>(std::cos(ph), -std::sin(ph));
  }
  return 2.0 * std::abs(acc) / static_cast<double>(count);
}

inline std::vector<double> tone(double f_hz, double fs_hz, std::size_t n, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * f_hz * static_cast<double>(i) / fs_hz + phase);
  return x;
}

inline double db(double ratio) { return 20.0 * std::log10(ratio); }

/// Recording with float-representable samples, random shape and markers.
inline grasp::Recording random_recording(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_ch(1, 8), n_s(1, 400), n_mk(0, 12), cls(0, grasp::kNumClasses - 1), kind(0, 2);
  std::normal_distribution<float> val(0.0f, 50.0f);
  grasp::Recording r;
  const int c = n_ch(rng), s = n_s(rng);
  r.fs_hz = std::uniform_real_distribution<double>(100.0, 5000.0)(rng);
  r.data.resize(c, s);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < s; ++j) r.data(i, j) = static_cast<double>(val(rng));
    r.labels.push_back("ch" + std::to_string(i));
    r.modality.push_back(kind(rng) == 0 ? grasp::Modality::EMG : grasp::Modality::EEG);
  }
  const int m = n_mk(rng);
  std::uniform_int_distribution<int> pos(0, s - 1);
  for (int k = 0; k < m; ++k) {
    grasp::Marker mk;
    mk.sample_index = static_cast<std::size_t>(pos(rng));
    switch (kind(rng)) {
      case 0:
        mk.kind = grasp::MarkerKind::CueOnset;
        mk.class_id = cls(rng);
        mk.description = "S  " + std::to_string(*mk.class_id + 1);
        break;
      case 1:
        mk.kind = grasp::MarkerKind::RestOnset;
        mk.description = "R  1";
        break;
      default:
        mk.kind = grasp::MarkerKind::Other;
    }
    r.markers.push_back(mk);
  }
  return r;
}

}  // namespace testing_helpers
