// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "adaptkit/core.hpp"
#include "adaptkit/dsp/conv.hpp"

namespace adaptkit::dsp {

/// Weights for one TCN block. `weights` is (channels, block input channels,
/// kernel_size). `film` is a (2 * channels) x (condition_dim + 1) row-major
/// affine map from the condition vector to [gamma; beta]; the last column is
/// the constant term.
struct TcnBlockWeights {
  int kernel_size = 3;
  int dilation = 1;
  int channels = 1;
  std::vector<float> weights;
  std::vector<float> bias;
  std::vector<float> film;

  bool operator==(const TcnBlockWeights&) const = default;
};

struct TcnWeights {
  int in_channels = 1;
  int out_channels = 1;
  int condition_dim = 0;
  std::vector<TcnBlockWeights> blocks;

  bool operator==(const TcnWeights&) const = default;

  /// FiLM map with gamma = 1, beta = 0 for every condition.
  static std::vector<float> identity_film(int channels, int condition_dim) {
    const auto cols = static_cast<std::size_t>(condition_dim) + 1;
    std::vector<float> film(2 * static_cast<std::size_t>(channels) * cols, 0.0f);
    for (int c = 0; c < channels; ++c) film[static_cast<std::size_t>(c) * cols + cols - 1] = 1.0f;
    return film;
  }

  std::size_t receptive_field() const {
    std::size_t rf = 1;
    for (const auto& b : blocks) rf += static_cast<std::size_t>(b.kernel_size - 1) * b.dilation;
    return rf;
  }

  void validate() const {
    if (in_channels < 1 || out_channels < 1) fail(ErrorKind::InvalidConfig, "TCN channel counts must be positive");
    if (condition_dim < 0) fail(ErrorKind::InvalidConfig, "TCN condition_dim must be >= 0");
    if (blocks.empty()) fail(ErrorKind::InvalidConfig, "TCN needs at least one block");
    int prev = in_channels;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = blocks[b];
      const std::string where = "TCN block " + std::to_string(b);
      if (blk.kernel_size < 1 || blk.dilation < 1 || blk.channels < 1)
        fail(ErrorKind::InvalidConfig, where + ": kernel, dilation and channels must be positive");
      const auto nw = static_cast<std::size_t>(blk.channels) * prev * blk.kernel_size;
      if (blk.weights.size() != nw) fail(ErrorKind::InvalidConfig, where + ": wrong weight count");
      if (blk.bias.size() != static_cast<std::size_t>(blk.channels))
        fail(ErrorKind::InvalidConfig, where + ": wrong bias count");
      const auto nf = 2 * static_cast<std::size_t>(blk.channels) * (static_cast<std::size_t>(condition_dim) + 1);
      if (blk.film.size() != nf) fail(ErrorKind::InvalidConfig, where + ": wrong FiLM matrix size");
      prev = blk.channels;
    }
    if (prev != out_channels) fail(ErrorKind::InvalidConfig, "last TCN block width must equal out_channels");
  }
};

/// Streaming temporal convolutional network with FiLM conditioning.
///
/// Each block computes y = residual(x) + tanh(gamma * conv(x) + beta), where
/// residual() maps channel counts without weights: equal widths pass through,
/// wider outputs repeat inputs cyclically, narrower outputs average the
/// inputs that fold onto them.
class TcnStack {
 public:
  TcnStack() = default;

  TcnStack(const TcnWeights& w, std::size_t max_frames) : weights_(w), max_frames_(max_frames) {
    w.validate();
    int prev = w.in_channels;
    std::size_t widest = static_cast<std::size_t>(w.in_channels);
    for (const auto& blk : w.blocks) {
      Block b;
      b.in_channels = prev;
      b.channels = blk.channels;
      b.conv = CachedConv1d(prev, blk.channels, blk.kernel_size, blk.dilation, blk.weights, blk.bias);
      b.gamma.assign(static_cast<std::size_t>(blk.channels), 1.0f);
      b.beta.assign(static_cast<std::size_t>(blk.channels), 0.0f);
      blocks_.push_back(std::move(b));
      widest = std::max(widest, static_cast<std::size_t>(blk.channels));
      prev = blk.channels;
    }
    scratch_a_.assign(widest * max_frames, 0.0f);
    scratch_b_.assign(widest * max_frames, 0.0f);
    conv_out_.assign(widest * max_frames, 0.0f);
    std::vector<float> zero(static_cast<std::size_t>(w.condition_dim), 0.0f);
    set_condition(zero);
  }

  int in_channels() const noexcept { return weights_.in_channels; }
  int out_channels() const noexcept { return weights_.out_channels; }
  int condition_dim() const noexcept { return weights_.condition_dim; }
  std::size_t receptive_field() const { return weights_.receptive_field(); }
  std::size_t max_frames() const noexcept { return max_frames_; }
  const TcnWeights& weights() const noexcept { return weights_; }

  void reset() noexcept {
    for (auto& b : blocks_) b.conv.reset();
  }

  /// Recomputes per-block gamma/beta from the condition vector.
  void set_condition(std::span<const float> condition) {
    if (condition.size() != static_cast<std::size_t>(weights_.condition_dim))
      shape_mismatch("TCN condition length", static_cast<std::size_t>(weights_.condition_dim), condition.size());
    const std::size_t cols = condition.size() + 1;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      auto& b = blocks_[bi];
      const auto& film = weights_.blocks[bi].film;
      for (int r = 0; r < 2 * b.channels; ++r) {
        const float* row = film.data() + static_cast<std::size_t>(r) * cols;
        float v = row[cols - 1];
        for (std::size_t c = 0; c < condition.size(); ++c) v += row[c] * condition[c];
        if (r < b.channels) b.gamma[static_cast<std::size_t>(r)] = v;
        else b.beta[static_cast<std::size_t>(r - b.channels)] = v;
      }
    }
  }

  /// Planar in/out with channel stride == frames; frames <= max_frames().
  void process(const float* in, std::size_t frames, float* out) {
    if (frames > max_frames_) shape_mismatch("TCN chunk frames (max)", max_frames_, frames);
    const float* x = in;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      auto& b = blocks_[bi];
      const bool last = bi + 1 == blocks_.size();
      float* y = last ? out : (bi % 2 == 0 ? scratch_a_.data() : scratch_b_.data());
      b.conv.process(x, frames, conv_out_.data());
      for (int o = 0; o < b.channels; ++o) {
        const float g = b.gamma[static_cast<std::size_t>(o)];
        const float be = b.beta[static_cast<std::size_t>(o)];
        const float* h = conv_out_.data() + static_cast<std::size_t>(o) * frames;
        float* yo = y + static_cast<std::size_t>(o) * frames;
        residual(x, b.in_channels, o, b.channels, frames, yo);
        for (std::size_t t = 0; t < frames; ++t) yo[t] += std::tanh(g * h[t] + be);
      }
      x = y;
    }
  }

  void process(const AudioBlock& in, AudioBlock& out) {
    if (in.channels() != in_channels()) shape_mismatch("TCN input channels", in_channels(), in.channels());
    out.resize(out_channels(), in.frames());
    process(in.samples().data(), in.frames(), out.samples().data());
  }

 private:
  struct Block {
    int in_channels = 1;
    int channels = 1;
    CachedConv1d conv;
    std::vector<float> gamma;
    std::vector<float> beta;
  };

  static void residual(const float* x, int in_ch, int o, int out_ch, std::size_t frames, float* y) {
    if (out_ch >= in_ch) {
      const float* src = x + static_cast<std::size_t>(o % in_ch) * frames;
      std::copy_n(src, frames, y);
      return;
    }
    std::fill_n(y, frames, 0.0f);
    int count = 0;
    for (int i = o; i < in_ch; i += out_ch, ++count) {
      const float* src = x + static_cast<std::size_t>(i) * frames;
      for (std::size_t t = 0; t < frames; ++t) y[t] += src[t];
    }
    const float inv = 1.0f / static_cast<float>(count);
    for (std::size_t t = 0; t < frames; ++t) y[t] *= inv;
  }

  TcnWeights weights_;
  std::size_t max_frames_ = 0;
  std::vector<Block> blocks_;
  std::vector<float> scratch_a_;
  std::vector<float> scratch_b_;
  std::vector<float> conv_out_;
};

}  // namespace adaptkit::dsp
