#pragma once

// Recursive filter design (Butterworth sections via the bilinear transform,
// second-order notch) and zero-phase forward-backward application.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "grasp/error.hpp"

namespace grasp::filter {

/// Direct-form II transposed section, a0 normalized to 1. First-order
/// sections carry b2 = a2 = 0.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

  std::complex<double> response(double f_hz, double fs_hz) const {
    const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs_hz);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }
};

struct Cascade {
  std::vector<Biquad> sections;
  /// Nominal filter order; sets the edge padding of the zero-phase pass.
  int order = 0;

  double magnitude(double f_hz, double fs_hz) const {
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= s.response(f_hz, fs_hz);
    return std::abs(h);
  }
};

enum class Response { Lowpass, Highpass };

/// Butterworth lowpass/highpass of the given order at cutoff fc.
inline Cascade butterworth(Response type, int order, double fc_hz, double fs_hz) {
  if (order < 1) fail(ErrorKind::InvalidBand, "filter order must be positive");
  if (!(fc_hz > 0) || !(fc_hz < fs_hz / 2))
    fail(ErrorKind::InvalidBand, "cutoff " + std::to_string(fc_hz) + " Hz outside (0, fs/2)");
  const double k = std::tan(std::numbers::pi * fc_hz / fs_hz);
  const double k2 = k * k;
  Cascade out;
  out.order = order;
  for (int i = 0; i < order / 2; ++i) {
    // Section Q for the i-th conjugate pole pair: 1/Q = 2 sin((2i+1) pi / 2n).
    const double q_inv = 2.0 * std::sin(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order));
    const double norm = 1.0 / (1.0 + k * q_inv + k2);
    Biquad s;
    if (type == Response::Lowpass) {
      s.b0 = k2 * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - k * q_inv + k2) * norm;
    out.sections.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s;
    const double norm = 1.0 / (k + 1.0);
    if (type == Response::Lowpass) {
      s.b0 = k * norm;
      s.b1 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -norm;
    }
    s.a1 = (k - 1.0) * norm;
    out.sections.push_back(s);
  }
  return out;
}

/// Band-pass of total order `order` (even): a highpass at lo and a lowpass at
/// hi, each of order/2.
inline Cascade butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs_hz) {
  if (order < 2 || order % 2 != 0) fail(ErrorKind::InvalidBand, "band-pass order must be even and >= 2");
  if (!(lo_hz > 0) || !(lo_hz < hi_hz) || !(hi_hz < fs_hz / 2))
    fail(ErrorKind::InvalidBand, "band [" + std::to_string(lo_hz) + ", " + std::to_string(hi_hz) +
                                     "] Hz violates 0 < lo < hi < fs/2");
  Cascade hp = butterworth(Response::Highpass, order / 2, lo_hz, fs_hz);
  Cascade lp = butterworth(Response::Lowpass, order / 2, hi_hz, fs_hz);
  Cascade out;
  out.order = order;
  out.sections = hp.sections;
  out.sections.insert(out.sections.end(), lp.sections.begin(), lp.sections.end());
  return out;
}

/// Second-order notch with quality factor Q = f0 / bandwidth.
inline Cascade notch(double f0_hz, double bandwidth_hz, double fs_hz) {
  if (!(f0_hz > 0) || !(f0_hz < fs_hz / 2))
    fail(ErrorKind::InvalidBand, "notch frequency " + std::to_string(f0_hz) + " Hz outside (0, fs/2)");
  if (!(bandwidth_hz > 0)) fail(ErrorKind::InvalidBand, "notch bandwidth must be positive");
  const double w0 = 2.0 * std::numbers::pi * f0_hz / fs_hz;
  const double alpha = std::sin(w0) / (2.0 * (f0_hz / bandwidth_hz));
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * std::cos(w0) / a0;
  s.b2 = 1.0 / a0;
  s.a1 = s.b1;
  s.a2 = (1.0 - alpha) / a0;
  return Cascade{{s}, 2};
}

/// Runs the cascade over x in place. The section states start at the steady
/// state for a constant input equal to x[0].
inline void run_cascade(const Cascade& cascade, std::span<double> x) {
  if (x.empty()) return;
  double level = x[0];
  for (const auto& s : cascade.sections) {
    const double y_ss = level * s.dc_gain();
    double z2 = s.b2 * level - s.a2 * y_ss;
    double z1 = s.b1 * level - s.a1 * y_ss + z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    level = y_ss;
  }
}

/// Zero-phase filtering. The signal is odd-reflect padded by 3 x order samples
/// at each end and run through the cascade twice in opposite directions. Both
/// orderings (forward-first and backward-first) are computed and averaged, so
/// the result commutes exactly with time reversal of the input.
inline void filtfilt(const Cascade& cascade, std::span<double> x) {
  const std::size_t n = x.size();
  if (n == 0) return;
  const std::size_t pad = std::min<std::size_t>(3 * static_cast<std::size_t>(cascade.order), n - 1);
  std::vector<double> fwd(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    fwd[i] = 2.0 * x[0] - x[pad - i];
    fwd[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), fwd.begin() + static_cast<std::ptrdiff_t>(pad));
  std::vector<double> bwd(fwd.rbegin(), fwd.rend());

  run_cascade(cascade, fwd);
  std::reverse(fwd.begin(), fwd.end());
  run_cascade(cascade, fwd);  // fwd now holds the result time-reversed

  run_cascade(cascade, bwd);
  std::reverse(bwd.begin(), bwd.end());
  run_cascade(cascade, bwd);

  for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 * (fwd[n + pad - 1 - i] + bwd[pad + i]);
}

}  // namespace grasp::filter
