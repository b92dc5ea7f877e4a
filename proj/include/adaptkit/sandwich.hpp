// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>

#include "adaptkit/core.hpp"
#include "adaptkit/resampler.hpp"

namespace adaptkit {

/// Maps `src_channels` planar channels onto `dst_channels`:
/// equal counts copy, fewer destination channels take the mean of the source
/// channels that fold onto them (src % dst), more destination channels
/// duplicate sources cyclically.
inline void remap_channels(const float* src, int src_channels, float* dst, int dst_channels, std::size_t frames) {
  if (dst_channels <= src_channels) {
    for (int d = 0; d < dst_channels; ++d) {
      float* out = dst + static_cast<std::size_t>(d) * frames;
      std::copy_n(src + static_cast<std::size_t>(d) * frames, frames, out);
      int count = 1;
      for (int s = d + dst_channels; s < src_channels; s += dst_channels, ++count) {
        const float* in = src + static_cast<std::size_t>(s) * frames;
        for (std::size_t i = 0; i < frames; ++i) out[i] += in[i];
      }
      if (count > 1) {
        const float inv = 1.0f / static_cast<float>(count);
        for (std::size_t i = 0; i < frames; ++i) out[i] *= inv;
      }
    }
  } else {
    for (int d = 0; d < dst_channels; ++d)
      std::copy_n(src + static_cast<std::size_t>(d % src_channels) * frames, frames, dst + static_cast<std::size_t>(d) * frames);
  }
}

/// Host <-> model channel adaptation. Stateless.
class ChannelNormalizer {
 public:
  ChannelNormalizer() = default;

  ChannelNormalizer(int host_channels, int model_in_channels, int model_out_channels)
      : host_(host_channels), in_(model_in_channels), out_(model_out_channels) {
    if (host_ < 1 || host_ > kMaxChannels)
      fail(ErrorKind::UnsupportedChannelCount, "host channel count must be 1..8, got " + std::to_string(host_));
    auto model_ok = [](int c) { return c == 1 || c == 2; };
    if (!model_ok(in_) || !model_ok(out_))
      fail(ErrorKind::UnsupportedChannelCount, "model channel counts must be 1 or 2");
  }

  int host_channels() const noexcept { return host_; }
  int model_in_channels() const noexcept { return in_; }
  int model_out_channels() const noexcept { return out_; }

  /// Host block -> model input channels. `output` is reshaped in place.
  void normalize_in(const AudioBlock& input, AudioBlock& output) const {
    if (input.channels() != host_) shape_mismatch("host channels", host_, input.channels());
    output.resize(in_, input.frames());
    remap_channels(input.samples().data(), host_, output.samples().data(), in_, input.frames());
  }

  /// Model output channels -> host block.
  void normalize_out(const AudioBlock& input, AudioBlock& output) const {
    if (input.channels() != out_) shape_mismatch("model output channels", out_, input.channels());
    output.resize(host_, input.frames());
    remap_channels(input.samples().data(), out_, output.samples().data(), host_, input.frames());
  }

  AudioBlock normalize_in(const AudioBlock& input) const {
    AudioBlock out;
    normalize_in(input, out);
    return out;
  }

  AudioBlock normalize_out(const AudioBlock& input) const {
    AudioBlock out;
    normalize_out(input, out);
    return out;
  }

 private:
  int host_ = 1;
  int in_ = 1;
  int out_ = 1;
};

enum class Direction { ToModel, ToHost };

/// The resampler pair around a processor: host rate -> model rate on the way
/// in, model rate -> host rate on the way out.
class ResampleSandwich {
 public:
  ResampleSandwich() = default;

  ResampleSandwich(ResamplerKind kind, SampleRate host, SampleRate model, int in_channels, int out_channels)
      : to_model_(make_audio_resampler(kind, in_channels, host, model)),
        to_host_(make_audio_resampler(kind, out_channels, model, host)) {}

  std::size_t resample(const AudioBlock& block, Direction dir, AudioBlock& out) {
    return dir == Direction::ToModel ? to_model_.process(block, out) : to_host_.process(block, out);
  }

  AudioBlock resample(const AudioBlock& block, Direction dir) {
    AudioBlock out;
    resample(block, dir, out);
    return out;
  }

  AudioResampler& to_model() noexcept { return to_model_; }
  AudioResampler& to_host() noexcept { return to_host_; }

  /// Latency of each direction at its input rate.
  int delay(Direction dir) const noexcept { return dir == Direction::ToModel ? to_model_.delay() : to_host_.delay(); }

  void reset() noexcept {
    to_model_.reset();
    to_host_.reset();
  }

 private:
  AudioResampler to_model_;
  AudioResampler to_host_;
};

}  // namespace adaptkit
