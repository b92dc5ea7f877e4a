// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "adaptkit/core.hpp"

namespace adaptkit {

enum class ResamplerKind { Linear, Hermite };

inline const char* to_string(ResamplerKind k) { return k == ResamplerKind::Linear ? "linear" : "hermite"; }

/// Two-tap linear interpolation between y0 and y1.
struct LinearKernel {
  static constexpr int kTaps = 2;
  static constexpr int kDelay = 1;

  // taps[0] = y0, taps[1] = y1
  static float eval(const float* taps, double x) noexcept {
    const auto xf = static_cast<float>(x);
    return (1.0f - xf) * taps[0] + xf * taps[1];
  }
};

/// 4-point, 3rd-order Hermite (Catmull-Rom) interpolation, x-form.
struct HermiteKernel {
  static constexpr int kTaps = 4;
  static constexpr int kDelay = 2;

  // taps[0..3] = y[-1], y[0], y[1], y[2]
  static float eval(const float* taps, double x) noexcept {
    const float ym1 = taps[0], y0 = taps[1], y1 = taps[2], y2 = taps[3];
    const auto xf = static_cast<float>(x);
    const float c0 = y0;
    const float c1 = 0.5f * (y1 - ym1);
    const float c2 = ym1 - 2.5f * y0 + 2.0f * y1 - 0.5f * y2;
    const float c3 = 0.5f * (y2 - ym1) + 1.5f * (y0 - y1);
    return ((c3 * xf + c2) * xf + c1) * xf + c0;
  }
};

/// Sample-and-pick: the tap nearest the read position, ties to the later one.
/// Shares tap geometry with `Aligned` so control lanes line up with audio.
template <typename Aligned>
struct NearestKernel {
  static constexpr int kTaps = Aligned::kTaps;
  static constexpr int kDelay = Aligned::kDelay;

  static float eval(const float* taps, double x) noexcept {
    constexpr int origin = kTaps - 1 - kDelay;
    return x < 0.5 ? taps[origin] : taps[origin + 1];
  }
};

/// Streaming fixed-ratio resampler.
///
/// The ratio is kept as a reduced fraction up/down = f_out/f_in and the read
/// position as an integer remainder, so output k always sits at exactly
/// k * f_in / f_out input samples. The interpolation origin trails the newest
/// input by Kernel::kDelay samples; that is the resampler's latency at the
/// input rate. After N input frames the resampler has produced
/// ceil(N * f_out / f_in) output frames in total, regardless of chunking.
///
/// Equal rates bypass interpolation entirely (copy, zero latency).
template <typename Kernel>
class StreamResampler {
 public:
  StreamResampler() = default;

  StreamResampler(int channels, SampleRate f_in, SampleRate f_out) : channels_(channels) {
    if (channels < 1) fail(ErrorKind::UnsupportedChannelCount, "resampler needs at least one channel");
    const std::int64_t g = std::gcd(f_in.hz(), f_out.hz());
    up_ = f_out.hz() / g;
    down_ = f_in.hz() / g;
    history_.assign(static_cast<std::size_t>(channels) * Kernel::kTaps, 0.0f);
    reset();
  }

  int channels() const noexcept { return channels_; }
  bool bypassed() const noexcept { return up_ == down_; }
  std::int64_t up() const noexcept { return up_; }
  std::int64_t down() const noexcept { return down_; }

  /// Latency in input-rate samples.
  int delay() const noexcept { return bypassed() ? 0 : Kernel::kDelay; }

  void reset() noexcept {
    std::fill(history_.begin(), history_.end(), 0.0f);
    acc_ = 0;
    inputs_ = 0;
    outputs_ = 0;
  }

  std::uint64_t total_inputs() const noexcept { return inputs_; }
  std::uint64_t total_outputs() const noexcept { return outputs_; }

  /// Upper bound on outputs produced from `frames` inputs in one call.
  std::size_t max_output(std::size_t frames) const noexcept {
    return static_cast<std::size_t>((static_cast<std::int64_t>(frames) * up_ + down_ - 1) / down_) + 1;
  }

  /// Frames the next call would emit for `frames` inputs.
  std::size_t output_count(std::size_t frames) const noexcept {
    if (bypassed()) return frames;
    // count k with acc_ + k*down < frames*up
    const std::int64_t span = static_cast<std::int64_t>(frames) * up_ - acc_;
    if (span <= 0) return 0;
    return static_cast<std::size_t>((span + down_ - 1) / down_);
  }

  /// Planar resample. `out` must have room for max_output(frames) frames per
  /// channel at stride `out_stride`. Returns the number of frames written.
  std::size_t process(const float* in, std::size_t in_stride, std::size_t frames, float* out, std::size_t out_stride) {
    if (bypassed()) {
      for (int c = 0; c < channels_; ++c)
        std::copy_n(in + static_cast<std::size_t>(c) * in_stride, frames, out + static_cast<std::size_t>(c) * out_stride);
      inputs_ += frames;
      outputs_ += frames;
      return frames;
    }
    std::size_t produced = 0;
    std::int64_t acc = acc_;
    for (int c = 0; c < channels_; ++c) {
      float* taps = history_.data() + static_cast<std::size_t>(c) * Kernel::kTaps;
      const float* x = in + static_cast<std::size_t>(c) * in_stride;
      float* y = out + static_cast<std::size_t>(c) * out_stride;
      acc = acc_;
      std::size_t n = 0;
      for (std::size_t j = 0; j < frames; ++j) {
        for (int t = 0; t + 1 < Kernel::kTaps; ++t) taps[t] = taps[t + 1];
        taps[Kernel::kTaps - 1] = x[j];
        while (acc < up_) {
          y[n++] = Kernel::eval(taps, static_cast<double>(acc) / static_cast<double>(up_));
          acc += down_;
        }
        acc -= up_;
      }
      produced = n;
    }
    acc_ = acc;
    inputs_ += frames;
    outputs_ += produced;
    return produced;
  }

  /// Resamples `in` into `out`, reshaping `out` to the produced frame count
  /// (in place when `out` has capacity for max_output()).
  std::size_t process(const AudioBlock& in, AudioBlock& out) {
    if (in.channels() != channels_) shape_mismatch("resampler channels", channels_, in.channels());
    const std::size_t n = output_count(in.frames());
    out.resize(channels_, n);
    return process(in.samples().data(), in.frames(), in.frames(), out.samples().data(), n);
  }

 private:
  int channels_ = 1;
  std::int64_t up_ = 1;
  std::int64_t down_ = 1;
  std::int64_t acc_ = 0;  // (next output index) * down - (next input index) * up
  std::uint64_t inputs_ = 0;
  std::uint64_t outputs_ = 0;
  std::vector<float> history_;
};

using LinearResampler = StreamResampler<LinearKernel>;
using Hermite4pResampler = StreamResampler<HermiteKernel>;

/// Non-streaming evaluation at exact positions k * f_in / f_out with no
/// latency, treating samples outside the signal as zero. Used for whole-file
/// (offline) conversion where look-ahead is free.
template <typename Kernel>
std::vector<float> resample_aligned(std::span<const float> in, SampleRate f_in, SampleRate f_out, std::size_t out_frames) {
  std::vector<float> out(out_frames, 0.0f);
  if (f_in == f_out) {
    std::copy_n(in.begin(), std::min(in.size(), out_frames), out.begin());
    return out;
  }
  const std::int64_t g = std::gcd(f_in.hz(), f_out.hz());
  const std::int64_t up = f_out.hz() / g;
  const std::int64_t down = f_in.hz() / g;
  constexpr int origin = Kernel::kTaps - 1 - Kernel::kDelay;
  std::array<float, Kernel::kTaps> taps{};
  auto sample = [&](std::int64_t idx) -> float {
    return idx >= 0 && idx < static_cast<std::int64_t>(in.size()) ? in[static_cast<std::size_t>(idx)] : 0.0f;
  };
  for (std::size_t k = 0; k < out_frames; ++k) {
    const std::int64_t pos = static_cast<std::int64_t>(k) * down;
    const std::int64_t base = pos / up;
    const double x = static_cast<double>(pos % up) / static_cast<double>(up);
    for (int t = 0; t < Kernel::kTaps; ++t) taps[static_cast<std::size_t>(t)] = sample(base - origin + t);
    out[k] = Kernel::eval(taps.data(), x);
  }
  return out;
}

/// Runtime choice between resampler kernels with a shared interface.
template <typename... Impls>
class AnyResampler {
 public:
  AnyResampler() = default;
  template <typename Impl>
  explicit AnyResampler(Impl impl) : impl_(std::move(impl)) {}

  int delay() const noexcept {
    return std::visit([](const auto& r) { return r.delay(); }, impl_);
  }
  bool bypassed() const noexcept {
    return std::visit([](const auto& r) { return r.bypassed(); }, impl_);
  }
  void reset() noexcept {
    std::visit([](auto& r) { r.reset(); }, impl_);
  }
  std::uint64_t total_inputs() const noexcept {
    return std::visit([](const auto& r) { return r.total_inputs(); }, impl_);
  }
  std::uint64_t total_outputs() const noexcept {
    return std::visit([](const auto& r) { return r.total_outputs(); }, impl_);
  }
  std::size_t max_output(std::size_t frames) const noexcept {
    return std::visit([frames](const auto& r) { return r.max_output(frames); }, impl_);
  }
  std::size_t output_count(std::size_t frames) const noexcept {
    return std::visit([frames](const auto& r) { return r.output_count(frames); }, impl_);
  }
  std::size_t process(const float* in, std::size_t in_stride, std::size_t frames, float* out, std::size_t out_stride) {
    return std::visit([&](auto& r) { return r.process(in, in_stride, frames, out, out_stride); }, impl_);
  }
  std::size_t process(const AudioBlock& in, AudioBlock& out) {
    return std::visit([&](auto& r) { return r.process(in, out); }, impl_);
  }

 private:
  std::variant<Impls...> impl_;
};

using AudioResampler = AnyResampler<LinearResampler, Hermite4pResampler>;
using ControlResampler =
    AnyResampler<StreamResampler<NearestKernel<LinearKernel>>, StreamResampler<NearestKernel<HermiteKernel>>>;

inline AudioResampler make_audio_resampler(ResamplerKind kind, int channels, SampleRate f_in, SampleRate f_out) {
  if (kind == ResamplerKind::Linear) return AudioResampler(LinearResampler(channels, f_in, f_out));
  return AudioResampler(Hermite4pResampler(channels, f_in, f_out));
}

/// Nearest-neighbour resampler whose timing matches the audio kernel `kind`,
/// so control values stay aligned with the audio they accompany.
inline ControlResampler make_control_resampler(ResamplerKind kind, int channels, SampleRate f_in, SampleRate f_out) {
  if (kind == ResamplerKind::Linear)
    return ControlResampler(StreamResampler<NearestKernel<LinearKernel>>(channels, f_in, f_out));
  return ControlResampler(StreamResampler<NearestKernel<HermiteKernel>>(channels, f_in, f_out));
}

inline int kernel_delay(ResamplerKind kind) {
  return kind == ResamplerKind::Linear ? LinearKernel::kDelay : HermiteKernel::kDelay;
}

}  // namespace adaptkit
