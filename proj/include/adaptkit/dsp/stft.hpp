// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "adaptkit/circular_queue.hpp"
#include "adaptkit/core.hpp"

namespace adaptkit::dsp {

/// Periodic Hann window of length n.
inline std::vector<double> periodic_hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

/// Real FFT of fixed size with FFTW plans made once up front. Execution
/// reuses the plan buffers and does not allocate.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    time_ = fftw_alloc_real(n);
    freq_ = fftw_alloc_complex(n / 2 + 1);
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), time_, freq_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_, time_, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(time_);
    fftw_free(freq_);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  std::span<double> time() noexcept { return {time_, n_}; }
  std::span<std::complex<double>> freq() noexcept {
    return {reinterpret_cast<std::complex<double>*>(freq_), bins()};
  }

  void forward() noexcept { fftw_execute(forward_); }
  /// Unnormalised inverse: time() ends up scaled by size().
  void inverse() noexcept { fftw_execute(inverse_); }

 private:
  std::size_t n_;
  double* time_ = nullptr;
  fftw_complex* freq_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Streaming short-time analysis. The stream is preceded by n_fft - hop
/// zeros, so frame m covers input samples [(m + 1) * hop - n_fft, (m + 1) * hop).
class StftAnalyzer {
 public:
  StftAnalyzer(std::size_t n_fft, std::size_t hop)
      : n_fft_(n_fft), hop_(hop), window_(periodic_hann(n_fft)), buffer_(n_fft, 0.0), fft_(n_fft) {
    if (n_fft < 2 || hop == 0 || hop > n_fft || n_fft % hop != 0)
      fail(ErrorKind::InvalidConfig, "hop must divide n_fft");
  }

  std::size_t n_fft() const noexcept { return n_fft_; }
  std::size_t hop() const noexcept { return hop_; }
  std::size_t bins() const noexcept { return n_fft_ / 2 + 1; }
  std::span<const double> window() const noexcept { return window_; }

  void reset() noexcept {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
    pending_ = 0;
  }

  /// Calls on_frame(std::span<std::complex<double>>) for every completed frame.
  template <typename Sink>
  void push(std::span<const float> chunk, Sink&& on_frame) {
    const std::size_t base = n_fft_ - hop_;
    for (float s : chunk) {
      buffer_[base + pending_] = s;
      if (++pending_ < hop_) continue;
      auto t = fft_.time();
      for (std::size_t i = 0; i < n_fft_; ++i) t[i] = buffer_[i] * window_[i];
      fft_.forward();
      on_frame(fft_.freq());
      std::copy(buffer_.begin() + static_cast<std::ptrdiff_t>(hop_), buffer_.end(), buffer_.begin());
      pending_ = 0;
    }
  }

 private:
  std::size_t n_fft_;
  std::size_t hop_;
  std::vector<double> window_;
  std::vector<double> buffer_;
  std::size_t pending_ = 0;
  RealFft fft_;
};

/// Streaming inverse: windowed overlap-add, divided by the precomputed
/// overlap sum of analysis x synthesis windows. Completed samples wait in a
/// FIFO until pulled.
class IstftSynthesizer {
 public:
  IstftSynthesizer(std::size_t n_fft, std::size_t hop, std::size_t fifo_capacity)
      : n_fft_(n_fft),
        hop_(hop),
        window_(periodic_hann(n_fft)),
        accum_(n_fft, 0.0),
        overlap_(hop, 0.0),
        fifo_(1, fifo_capacity + n_fft),
        out_(hop, 0.0f),
        fft_(n_fft) {
    for (std::size_t i = 0; i < n_fft; ++i) overlap_[i % hop] += window_[i] * window_[i];
    const double lo = *std::min_element(overlap_.begin(), overlap_.end());
    if (!(lo > 1e-3)) fail(ErrorKind::InvalidConfig, "window/hop pair does not overlap-add to a usable sum");
  }

  void reset() noexcept {
    std::fill(accum_.begin(), accum_.end(), 0.0);
    fifo_.clear();
  }

  std::size_t available() const noexcept { return fifo_.fill(); }
  std::span<const double> overlap_sum() const noexcept { return overlap_; }

  void push_frame(std::span<const std::complex<double>> bins) {
    if (bins.size() != n_fft_ / 2 + 1) shape_mismatch("STFT frame bins", n_fft_ / 2 + 1, bins.size());
    std::copy(bins.begin(), bins.end(), fft_.freq().begin());
    fft_.inverse();
    const auto t = fft_.time();
    const double scale = 1.0 / static_cast<double>(n_fft_);
    for (std::size_t i = 0; i < n_fft_; ++i) accum_[i] += t[i] * scale * window_[i];
    for (std::size_t i = 0; i < hop_; ++i) out_[i] = static_cast<float>(accum_[i] / overlap_[i]);
    fifo_.push(out_.data(), hop_, 0, hop_);
    std::copy(accum_.begin() + static_cast<std::ptrdiff_t>(hop_), accum_.end(), accum_.begin());
    std::fill(accum_.end() - static_cast<std::ptrdiff_t>(hop_), accum_.end(), 0.0f);
  }

  /// Pops up to out.size() samples; returns how many were written.
  std::size_t pull(std::span<float> out) {
    const std::size_t n = std::min(out.size(), fifo_.fill());
    fifo_.pop(out.data(), n, 0, n);
    return n;
  }

 private:
  std::size_t n_fft_;
  std::size_t hop_;
  std::vector<double> window_;
  std::vector<double> accum_;
  std::vector<double> overlap_;
  CircularQueue fifo_;
  std::vector<float> out_;
  RealFft fft_;
};

/// Analysis + optional spectral edit + resynthesis with a fixed latency of
/// n_fft - hop samples. Hop must be n_fft / 2 or n_fft / 4.
class RealtimeStft {
 public:
  RealtimeStft(std::size_t n_fft, std::size_t hop, std::size_t max_chunk = 8192)
      : analyzer_(checked(n_fft, hop), hop), synth_(n_fft, hop, max_chunk) {}

  std::size_t n_fft() const noexcept { return analyzer_.n_fft(); }
  std::size_t hop() const noexcept { return analyzer_.hop(); }
  std::size_t delay() const noexcept { return n_fft() - hop(); }
  std::size_t available() const noexcept { return synth_.available(); }

  void reset() noexcept {
    analyzer_.reset();
    synth_.reset();
  }

  /// Analyses `chunk`; each frame goes through edit(bins) before synthesis.
  template <typename Edit>
  void push(std::span<const float> chunk, Edit&& edit) {
    analyzer_.push(chunk, [&](std::span<std::complex<double>> bins) {
      edit(bins);
      synth_.push_frame(bins);
    });
  }

  void push(std::span<const float> chunk) {
    push(chunk, [](std::span<std::complex<double>>) {});
  }

  std::size_t pull(std::span<float> out) { return synth_.pull(out); }

 private:
  static std::size_t checked(std::size_t n_fft, std::size_t hop) {
    if (n_fft < 4 || n_fft % 4 != 0 || (hop != n_fft / 2 && hop != n_fft / 4))
      fail(ErrorKind::InvalidConfig, "hop must be n_fft/2 or n_fft/4");
    return n_fft;
  }

  StftAnalyzer analyzer_;
  IstftSynthesizer synth_;
};

// Spectral helpers ----------------------------------------------------------

inline void magnitude(std::span<const std::complex<double>> bins, std::span<float> out) {
  for (std::size_t k = 0; k < bins.size(); ++k) out[k] = static_cast<float>(std::abs(bins[k]));
}

inline void phase(std::span<const std::complex<double>> bins, std::span<float> out) {
  for (std::size_t k = 0; k < bins.size(); ++k) out[k] = static_cast<float>(std::arg(bins[k]));
}

inline void from_polar(std::span<const float> mag, std::span<const float> ph, std::span<std::complex<double>> bins) {
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = std::polar<double>(mag[k], ph[k]);
}

/// Scales bins so a full-scale sinusoid on a bin centre reads 1.0.
inline void normalize_spectrum(std::span<std::complex<double>> bins, std::span<const double> window) {
  double sum = 0.0;
  for (double w : window) sum += w;
  const double scale = 2.0 / sum;
  for (auto& b : bins) b *= scale;
}

/// Linear crossfade from `from` to `to` over the whole span.
inline void crossfade(std::span<const float> from, std::span<const float> to, std::span<float> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const float t = n > 1 ? static_cast<float>(i) / static_cast<float>(n - 1) : 1.0f;
    out[i] = (1.0f - t) * from[i] + t * to[i];
  }
}

}  // namespace adaptkit::dsp
