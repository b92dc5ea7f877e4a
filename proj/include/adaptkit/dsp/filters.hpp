// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "adaptkit/core.hpp"
#include "adaptkit/dsp/conv.hpp"

namespace adaptkit::dsp {

enum class FilterKind { Lowpass, Highpass, Bandpass, Bandstop };

struct BiquadCoeffs {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;  // a0 normalised to 1
};

/// RBJ audio-EQ-cookbook designs. Bandpass has 0 dB peak gain.
inline BiquadCoeffs design_biquad(FilterKind kind, double f_c, double q, double f_s) {
  if (!(f_c > 0.0 && f_c < f_s / 2.0)) fail(ErrorKind::InvalidConfig, "cutoff must lie in (0, fs/2)");
  if (!(q > 0.0)) fail(ErrorKind::InvalidConfig, "Q must be positive");
  const double w0 = 2.0 * std::numbers::pi * f_c / f_s;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  double b0 = 0, b1 = 0, b2 = 0;
  const double a0 = 1.0 + alpha;
  switch (kind) {
    case FilterKind::Lowpass:
      b0 = (1.0 - cw) / 2.0;
      b1 = 1.0 - cw;
      b2 = b0;
      break;
    case FilterKind::Highpass:
      b0 = (1.0 + cw) / 2.0;
      b1 = -(1.0 + cw);
      b2 = b0;
      break;
    case FilterKind::Bandpass:
      b0 = alpha;
      b1 = 0.0;
      b2 = -alpha;
      break;
    case FilterKind::Bandstop:
      b0 = 1.0;
      b1 = -2.0 * cw;
      b2 = 1.0;
      break;
  }
  return {b0 / a0, b1 / a0, b2 / a0, (-2.0 * cw) / a0, (1.0 - alpha) / a0};
}

/// Transposed direct-form II biquad with independent state per channel.
class BiquadFilter {
 public:
  BiquadFilter(int channels, BiquadCoeffs c) : c_(c), s1_(static_cast<std::size_t>(channels), 0.0), s2_(s1_) {}

  void set_coeffs(const BiquadCoeffs& c) noexcept { c_ = c; }
  const BiquadCoeffs& coeffs() const noexcept { return c_; }

  void reset() noexcept {
    std::fill(s1_.begin(), s1_.end(), 0.0);
    std::fill(s2_.begin(), s2_.end(), 0.0);
  }

  /// In place.
  void process(AudioBlock& block) {
    if (static_cast<std::size_t>(block.channels()) != s1_.size())
      shape_mismatch("biquad channels", s1_.size(), static_cast<std::size_t>(block.channels()));
    for (int ch = 0; ch < block.channels(); ++ch) {
      double s1 = s1_[static_cast<std::size_t>(ch)];
      double s2 = s2_[static_cast<std::size_t>(ch)];
      for (float& v : block.channel(ch)) {
        const double x = v;
        const double y = c_.b0 * x + s1;
        s1 = c_.b1 * x - c_.a1 * y + s2;
        s2 = c_.b2 * x - c_.a2 * y;
        v = static_cast<float>(y);
      }
      s1_[static_cast<std::size_t>(ch)] = s1;
      s2_[static_cast<std::size_t>(ch)] = s2;
    }
  }

 private:
  BiquadCoeffs c_;
  std::vector<double> s1_;
  std::vector<double> s2_;
};

/// Topology-preserving (trapezoidal) state variable filter.
class SvfFilter {
 public:
  SvfFilter(int channels, FilterKind mode, double f_c, double q, double f_s)
      : mode_(mode), ic1_(static_cast<std::size_t>(channels), 0.0), ic2_(ic1_) {
    set(f_c, q, f_s);
  }

  void set(double f_c, double q, double f_s) {
    if (!(f_c > 0.0 && f_c < f_s / 2.0)) fail(ErrorKind::InvalidConfig, "cutoff must lie in (0, fs/2)");
    if (!(q > 0.0)) fail(ErrorKind::InvalidConfig, "Q must be positive");
    g_ = std::tan(std::numbers::pi * f_c / f_s);
    k_ = 1.0 / q;
    h_ = 1.0 / (1.0 + g_ * (g_ + k_));
  }

  void reset() noexcept {
    std::fill(ic1_.begin(), ic1_.end(), 0.0);
    std::fill(ic2_.begin(), ic2_.end(), 0.0);
  }

  void process(AudioBlock& block) {
    if (static_cast<std::size_t>(block.channels()) != ic1_.size())
      shape_mismatch("SVF channels", ic1_.size(), static_cast<std::size_t>(block.channels()));
    for (int ch = 0; ch < block.channels(); ++ch) {
      double s1 = ic1_[static_cast<std::size_t>(ch)];
      double s2 = ic2_[static_cast<std::size_t>(ch)];
      for (float& v : block.channel(ch)) {
        const double hp = (v - (k_ + g_) * s1 - s2) * h_;
        const double bp = g_ * hp + s1;
        s1 = g_ * hp + bp;
        const double lp = g_ * bp + s2;
        s2 = g_ * bp + lp;
        double y = lp;
        switch (mode_) {
          case FilterKind::Lowpass: y = lp; break;
          case FilterKind::Highpass: y = hp; break;
          case FilterKind::Bandpass: y = k_ * bp; break;
          case FilterKind::Bandstop: y = lp + hp; break;
        }
        v = static_cast<float>(y);
      }
      ic1_[static_cast<std::size_t>(ch)] = s1;
      ic2_[static_cast<std::size_t>(ch)] = s2;
    }
  }

 private:
  FilterKind mode_;
  double g_ = 0.0, k_ = 1.0, h_ = 1.0;
  std::vector<double> ic1_;
  std::vector<double> ic2_;
};

/// Windowed-sinc (Hamming) FIR design; `taps` must be odd. f_lo is the cutoff
/// for lowpass/highpass, f_lo..f_hi the band otherwise. h[n] applies to x[t - n].
inline std::vector<float> design_fir(FilterKind kind, double f_lo, double f_hi, int taps, double f_s) {
  if (taps < 1 || taps % 2 == 0) fail(ErrorKind::InvalidConfig, "FIR tap count must be odd");
  const bool band = kind == FilterKind::Bandpass || kind == FilterKind::Bandstop;
  if (!(f_lo > 0.0 && f_lo < f_s / 2.0) || (band && !(f_hi > f_lo && f_hi < f_s / 2.0)))
    fail(ErrorKind::InvalidConfig, "FIR band edges must lie in (0, fs/2)");
  const int m = (taps - 1) / 2;
  auto lowpass = [&](double fc, int n) {
    const double wc = 2.0 * fc / f_s;
    return n == 0 ? wc : std::sin(std::numbers::pi * wc * n) / (std::numbers::pi * n);
  };
  std::vector<float> h(static_cast<std::size_t>(taps));
  for (int i = 0; i < taps; ++i) {
    const int n = i - m;
    const double delta = n == 0 ? 1.0 : 0.0;
    double v = 0.0;
    switch (kind) {
      case FilterKind::Lowpass: v = lowpass(f_lo, n); break;
      case FilterKind::Highpass: v = delta - lowpass(f_lo, n); break;
      case FilterKind::Bandpass: v = lowpass(f_hi, n) - lowpass(f_lo, n); break;
      case FilterKind::Bandstop: v = delta - (lowpass(f_hi, n) - lowpass(f_lo, n)); break;
    }
    const double w = taps == 1 ? 1.0 : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
    h[static_cast<std::size_t>(i)] = static_cast<float>(v * w);
  }
  return h;
}

/// Streaming FIR filter built on CachedConv1d, one lane per channel.
class FirFilter {
 public:
  FirFilter(int channels, const std::vector<float>& taps) {
    std::vector<float> kernel(taps.rbegin(), taps.rend());
    for (int c = 0; c < channels; ++c)
      lanes_.emplace_back(1, 1, static_cast<int>(taps.size()), 1, kernel, std::vector<float>{0.0f});
  }

  std::size_t latency() const noexcept { return lanes_.empty() ? 0 : (lanes_.front().receptive_field() - 1) / 2; }

  void reset() noexcept {
    for (auto& l : lanes_) l.reset();
  }

  /// `out` is reshaped to match `in`; must not alias it.
  void process(const AudioBlock& in, AudioBlock& out) {
    if (static_cast<std::size_t>(in.channels()) != lanes_.size())
      shape_mismatch("FIR channels", lanes_.size(), static_cast<std::size_t>(in.channels()));
    out.resize(in.channels(), in.frames());
    for (int c = 0; c < in.channels(); ++c)
      lanes_[static_cast<std::size_t>(c)].process(in.channel(c).data(), in.frames(), out.channel(c).data());
  }

 private:
  std::vector<CachedConv1d> lanes_;
};

}  // namespace adaptkit::dsp
