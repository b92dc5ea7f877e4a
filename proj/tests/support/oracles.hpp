// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations. Nothing here calls into the library's
// algorithms; only its plain data types are shared.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

/// Minimal silence prefill so that a FIFO that gains `host` frames per
/// callback, releases `model`-frame blocks whenever it can, and hands
/// `host` frames back each callback never runs dry. Simulated over one
/// full period of the callback/block pattern.
inline std::int64_t fifo_min_prefill(std::int64_t host, std::int64_t model) {
  const std::int64_t period = std::lcm(host, model) / host;
  std::int64_t queued_in = 0, produced = 0, consumed = 0, worst = 0;
  for (std::int64_t cb = 0; cb < period; ++cb) {
    queued_in += host;
    while (queued_in >= model) {
      queued_in -= model;
      produced += model;
    }
    consumed += host;
    worst = std::max(worst, consumed - produced);
  }
  return worst;
}

/// Same, for an explicit sequence of per-callback arrivals (repeated
/// `repeats` times) rather than a constant span.
inline std::int64_t fifo_min_prefill_pattern(const std::vector<std::int64_t>& arrivals, std::int64_t model,
                                             int repeats = 4) {
  std::int64_t queued_in = 0, produced = 0, consumed = 0, worst = 0;
  for (int r = 0; r < repeats; ++r) {
    for (auto a : arrivals) {
      queued_in += a;
      while (queued_in >= model) {
        queued_in -= model;
        produced += model;
      }
      consumed += a;
      worst = std::max(worst, consumed - produced);
    }
  }
  return worst;
}

/// Whole-signal causal dilated convolution, PyTorch orientation: tap j
/// multiplies x[t - (k-1-j)*d]. x is [in][T], w is [out][in][k].
inline std::vector<std::vector<double>> causal_conv(const std::vector<std::vector<double>>& x,
                                                    const std::vector<double>& w, const std::vector<double>& bias,
                                                    int k, int d) {
  const std::size_t in = x.size(), out = bias.size(), T = x.front().size();
  std::vector<std::vector<double>> y(out, std::vector<double>(T, 0.0));
  for (std::size_t o = 0; o < out; ++o)
    for (std::size_t t = 0; t < T; ++t) {
      double acc = bias[o];
      for (std::size_t i = 0; i < in; ++i)
        for (int j = 0; j < k; ++j) {
          const std::int64_t src = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(k - 1 - j) * d;
          if (src >= 0) acc += w[(o * in + i) * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] * x[i][static_cast<std::size_t>(src)];
        }
      y[o][t] = acc;
    }
  return y;
}

inline std::vector<std::complex<double>> dft_real(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> X(n / 2 + 1);
  for (std::size_t k = 0; k < X.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(a), std::sin(a));
    }
    X[k] = acc;
  }
  return X;
}

inline std::vector<double> hann_periodic(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

/// Framing with an (n_fft - hop) zero lead-in, one frame per hop.
inline std::vector<std::vector<std::complex<double>>> stft(const std::vector<double>& x, std::size_t n_fft,
                                                           std::size_t hop) {
  std::vector<double> padded(n_fft - hop, 0.0);
  padded.insert(padded.end(), x.begin(), x.end());
  const auto w = hann_periodic(n_fft);
  std::vector<std::vector<std::complex<double>>> frames;
  for (std::size_t s = 0; s + n_fft <= padded.size(); s += hop) {
    std::vector<double> f(n_fft);
    for (std::size_t i = 0; i < n_fft; ++i) f[i] = padded[s + i] * w[i];
    frames.push_back(dft_real(f));
  }
  return frames;
}

/// HTK mel filterbank rebuilt from the textbook definition.
inline std::vector<std::vector<double>> mel_bank(double sr, std::size_t n_fft, std::size_t n_mels, double fmin,
                                                 double fmax) {
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  std::vector<double> pts;
  for (std::size_t i = 0; i < n_mels + 2; ++i)
    pts.push_back(hz(mel(fmin) + (mel(fmax) - mel(fmin)) * static_cast<double>(i) / static_cast<double>(n_mels + 1)));
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(n_fft / 2 + 1, 0.0));
  for (std::size_t m = 0; m < n_mels; ++m)
    for (std::size_t k = 0; k <= n_fft / 2; ++k) {
      const double f = sr * static_cast<double>(k) / static_cast<double>(n_fft);
      const double up = (f - pts[m]) / (pts[m + 1] - pts[m]);
      const double down = (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1]);
      bank[m][k] = std::max(0.0, std::min(up, down));
    }
  return bank;
}

/// |H(e^{jw})| of b0 + b1 z^-1 + b2 z^-2 over 1 + a1 z^-1 + a2 z^-2.
inline double biquad_magnitude(double b0, double b1, double b2, double a1, double a2, double f, double fs) {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f / fs);
  const auto z2 = z1 * z1;
  return std::abs((b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2));
}

/// Direct form I difference equation in double precision.
inline std::vector<double> biquad_df1(const std::vector<double>& x, double b0, double b1, double b2, double a1,
                                      double a2) {
  std::vector<double> y(x.size());
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    y[n] = b0 * x[n] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x[n];
    y2 = y1;
    y1 = y[n];
  }
  return y;
}

/// Blackman-windowed sinc interpolation of x at fractional position t.
inline double sinc_interp(const std::vector<double>& x, double t, double cutoff = 0.45, int half_width = 64) {
  const auto c = static_cast<std::int64_t>(std::floor(t));
  double acc = 0.0;
  for (std::int64_t n = c - half_width + 1; n <= c + half_width; ++n) {
    if (n < 0 || n >= static_cast<std::int64_t>(x.size())) continue;
    const double u = t - static_cast<double>(n);
    const double s = u == 0.0 ? 1.0 : std::sin(2.0 * std::numbers::pi * cutoff * u) / (std::numbers::pi * u);
    const double v = (u + half_width) / (2.0 * half_width);
    const double w = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * v) + 0.08 * std::cos(4.0 * std::numbers::pi * v);
    acc += x[static_cast<std::size_t>(n)] * (u == 0.0 ? 2.0 * cutoff : s) * (v >= 0.0 && v <= 1.0 ? w : 0.0);
  }
  return acc;
}

/// SNR in dB of `y` against `ref` over [from, to).
inline double snr_db(const std::vector<double>& ref, const std::vector<double>& y, std::size_t from, std::size_t to) {
  double sig = 0.0, err = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    sig += ref[i] * ref[i];
    err += (y[i] - ref[i]) * (y[i] - ref[i]);
  }
  return 10.0 * std::log10(sig / std::max(err, 1e-300));
}

/// Plain list-backed FIFO of frames for queue equivalence tests.
template <typename T>
struct ListQueue {
  std::deque<T> items;
  void push(const std::vector<T>& v) { items.insert(items.end(), v.begin(), v.end()); }
  bool pop(std::size_t n, std::vector<T>& out) {
    if (n > items.size()) return false;
    out.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n));
    items.erase(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n));
    return true;
  }
};

}  // namespace oracle
