// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "adaptkit/core.hpp"
#include "adaptkit/dsp/stft.hpp"

namespace adaptkit::dsp {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular HTK-scale filterbank, n_mels rows x (n_fft / 2 + 1) bins,
/// row-major. Band edges are n_mels + 2 points evenly spaced in mel.
inline std::vector<double> mel_filterbank(double sample_rate, std::size_t n_fft, std::size_t n_mels, double f_min,
                                          double f_max) {
  if (!(f_max <= sample_rate / 2.0)) fail(ErrorKind::InvalidConfig, "f_max above Nyquist");
  if (!(f_min >= 0.0 && f_min < f_max)) fail(ErrorKind::InvalidConfig, "need 0 <= f_min < f_max");
  if (n_mels == 0) fail(ErrorKind::InvalidConfig, "n_mels must be positive");
  const std::size_t bins = n_fft / 2 + 1;
  std::vector<double> edges(n_mels + 2);
  const double m_lo = hz_to_mel(f_min);
  const double m_hi = hz_to_mel(f_max);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));

  std::vector<double> fb(n_mels * bins, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > left && f <= centre) w = (f - left) / (centre - left);
      else if (f > centre && f < right) w = (right - f) / (right - centre);
      fb[m * bins + k] = w;
    }
  }
  return fb;
}

/// Streaming mel spectrogram: magnitude STFT (periodic Hann) times a
/// triangular mel filterbank. Framing matches StftAnalyzer.
class CachedMelSpec {
 public:
  CachedMelSpec(double sample_rate, std::size_t n_fft, std::size_t hop, std::size_t n_mels, double f_min, double f_max)
      : n_mels_(n_mels),
        filterbank_(mel_filterbank(sample_rate, n_fft, n_mels, f_min, f_max)),
        analyzer_(n_fft, hop),
        mag_(n_fft / 2 + 1, 0.0),
        frame_(n_mels, 0.0f) {}

  std::size_t n_mels() const noexcept { return n_mels_; }
  std::size_t bins() const noexcept { return mag_.size(); }
  const std::vector<double>& filterbank() const noexcept { return filterbank_; }

  void reset() noexcept { analyzer_.reset(); }

  /// Calls on_frame(std::span<const float>) with n_mels values per frame.
  template <typename Sink>
  void push(std::span<const float> chunk, Sink&& on_frame) {
    analyzer_.push(chunk, [&](std::span<std::complex<double>> spec) {
      for (std::size_t k = 0; k < mag_.size(); ++k) mag_[k] = std::abs(spec[k]);
      for (std::size_t m = 0; m < n_mels_; ++m) {
        const double* row = filterbank_.data() + m * mag_.size();
        double acc = 0.0;
        for (std::size_t k = 0; k < mag_.size(); ++k) acc += row[k] * mag_[k];
        frame_[m] = static_cast<float>(acc);
      }
      on_frame(std::span<const float>(frame_));
    });
  }

  std::vector<std::vector<float>> push(std::span<const float> chunk) {
    std::vector<std::vector<float>> frames;
    push(chunk, [&](std::span<const float> f) { frames.emplace_back(f.begin(), f.end()); });
    return frames;
  }

 private:
  std::size_t n_mels_;
  std::vector<double> filterbank_;
  StftAnalyzer analyzer_;
  std::vector<double> mag_;
  std::vector<float> frame_;
};

}  // namespace adaptkit::dsp
