// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "adaptkit/core.hpp"

namespace adaptkit::dsp {

/// Causal dilated 1-D convolution that carries its own input history between
/// calls, so a signal fed in arbitrary chunks produces the same output as the
/// whole signal fed at once.
///
/// Weights are laid out (out, in, tap). Tap j multiplies the input sample
/// (kernel_size - 1 - j) * dilation frames in the past, so the last tap sees
/// the current sample and an impulse comes out time-reversed.
class CachedConv1d {
 public:
  CachedConv1d() = default;

  CachedConv1d(int in_channels, int out_channels, int kernel_size, int dilation, std::vector<float> weights,
               std::vector<float> bias)
      : in_(in_channels),
        out_(out_channels),
        k_(kernel_size),
        d_(dilation),
        weights_(std::move(weights)),
        bias_(std::move(bias)) {
    if (in_ < 1 || out_ < 1) fail(ErrorKind::InvalidConfig, "conv channel counts must be positive");
    if (k_ < 1 || d_ < 1) fail(ErrorKind::InvalidConfig, "conv kernel size and dilation must be positive");
    const auto expected = static_cast<std::size_t>(in_) * out_ * k_;
    if (weights_.size() != expected) shape_mismatch("conv weights", expected, weights_.size());
    if (bias_.empty()) bias_.assign(static_cast<std::size_t>(out_), 0.0f);
    if (bias_.size() != static_cast<std::size_t>(out_)) shape_mismatch("conv bias", out_, bias_.size());
    history_len_ = static_cast<std::size_t>(k_ - 1) * d_;
    history_.assign(static_cast<std::size_t>(in_) * history_len_, 0.0f);
  }

  int in_channels() const noexcept { return in_; }
  int out_channels() const noexcept { return out_; }
  int kernel_size() const noexcept { return k_; }
  int dilation() const noexcept { return d_; }
  std::size_t receptive_field() const noexcept { return history_len_ + 1; }
  std::span<const float> weights() const noexcept { return weights_; }
  std::span<const float> bias() const noexcept { return bias_; }

  void reset() noexcept { std::fill(history_.begin(), history_.end(), 0.0f); }

  /// Planar in/out, channel stride == frames. `out` must not alias `in`.
  void process(const float* in, std::size_t frames, float* out) {
    const std::size_t hl = history_len_;
    for (int o = 0; o < out_; ++o) {
      float* y = out + static_cast<std::size_t>(o) * frames;
      std::fill_n(y, frames, bias_[static_cast<std::size_t>(o)]);
      for (int i = 0; i < in_; ++i) {
        const float* x = in + static_cast<std::size_t>(i) * frames;
        const float* h = history_.data() + static_cast<std::size_t>(i) * hl;
        const float* w = weights_.data() + (static_cast<std::size_t>(o) * in_ + i) * k_;
        for (int j = 0; j < k_; ++j) {
          const std::size_t lag = static_cast<std::size_t>(k_ - 1 - j) * d_;
          const float wj = w[j];
          const std::size_t split = std::min(lag, frames);
          for (std::size_t t = 0; t < split; ++t) y[t] += wj * h[hl + t - lag];
          for (std::size_t t = split; t < frames; ++t) y[t] += wj * x[t - lag];
        }
      }
    }
    push_history(in, frames);
  }

  void process(const AudioBlock& in, AudioBlock& out) {
    if (in.channels() != in_) shape_mismatch("conv input channels", in_, in.channels());
    out.resize(out_, in.frames());
    process(in.samples().data(), in.frames(), out.samples().data());
  }

 private:
  void push_history(const float* in, std::size_t frames) {
    const std::size_t hl = history_len_;
    if (hl == 0) return;
    for (int i = 0; i < in_; ++i) {
      float* h = history_.data() + static_cast<std::size_t>(i) * hl;
      const float* x = in + static_cast<std::size_t>(i) * frames;
      if (frames >= hl) {
        std::copy_n(x + frames - hl, hl, h);
      } else {
        std::copy(h + frames, h + hl, h);
        std::copy_n(x, frames, h + hl - frames);
      }
    }
  }

  int in_ = 1;
  int out_ = 1;
  int k_ = 1;
  int d_ = 1;
  std::vector<float> weights_{1.0f};
  std::vector<float> bias_{0.0f};
  std::size_t history_len_ = 0;
  std::vector<float> history_;
};

}  // namespace adaptkit::dsp
