// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "adaptkit/adapt.hpp"
#include "adaptkit/core.hpp"
#include "adaptkit/processor.hpp"
#include "adaptkit/resampler.hpp"
#include "adaptkit/sandwich.hpp"

namespace adaptkit {

struct OfflineCapabilities {
  std::vector<int> in_track_channels;   // one entry per input track; may be empty (generator)
  std::vector<int> out_track_channels;  // one entry per output track; at least one
  BufferSizeSet native_buffer_sizes = BufferSizeSet::any();
  SampleRateSet native_sample_rates = SampleRateSet::any();
  std::size_t delay_samples = 0;     // model rate
  std::size_t generated_frames = 0;  // model-rate output length for generators
};

inline void validate_offline_capabilities(const OfflineCapabilities& caps) {
  if (caps.out_track_channels.empty()) fail(ErrorKind::InvalidConfig, "offline processor needs an output track");
  auto ok = [](int c) { return c >= 1 && c <= kMaxChannels; };
  for (int c : caps.in_track_channels)
    if (!ok(c)) fail(ErrorKind::UnsupportedChannelCount, "track channel count must be 1..8");
  for (int c : caps.out_track_channels)
    if (!ok(c)) fail(ErrorKind::UnsupportedChannelCount, "track channel count must be 1..8");
  if (!caps.native_buffer_sizes.is_any() &&
      (caps.native_buffer_sizes.values().empty() || caps.native_buffer_sizes.values().front() == 0))
    fail(ErrorKind::InvalidConfig, "native buffer sizes must be non-empty and positive");
  if (!caps.native_sample_rates.is_any() && caps.native_sample_rates.values().empty())
    fail(ErrorKind::InvalidConfig, "empty native sample rate set");
  if (caps.in_track_channels.empty() && caps.generated_frames == 0)
    fail(ErrorKind::InvalidConfig, "generators must declare their output length");
}

/// Multi-track block processor that does not need to keep up with real time.
///
/// begin_run() receives every parameter value, text included, once per run.
/// process() then sees consecutive blocks: one input block per input track
/// (model channels x block frames) and output blocks pre-shaped to
/// out_track_channels x block frames.
class OfflineProcessor {
 public:
  virtual ~OfflineProcessor() = default;

  virtual const OfflineCapabilities& capabilities() const = 0;
  virtual std::span<const ParameterSpec> parameter_specs() const = 0;
  virtual const ModelMetadata& metadata() const = 0;

  virtual void begin_run(SampleRate /*model_rate*/, std::size_t /*block_frames*/,
                         std::span<const ParameterValue> /*params*/) {}
  virtual void process(std::span<const AudioBlock> inputs, std::span<AudioBlock> outputs) = 0;
};

/// Shared between a run and its observers. Progress is monotone and reaches
/// exactly 1.0 when (and only when) a run completes without cancellation.
class RunHandle {
 public:
  double progress() const noexcept { return progress_.load(std::memory_order_acquire); }
  void request_cancel() noexcept { cancel_.store(true, std::memory_order_release); }
  bool cancel_requested() const noexcept { return cancel_.load(std::memory_order_acquire); }
  bool finished() const noexcept { return finished_.load(std::memory_order_acquire); }

  void reset() noexcept {
    progress_.store(0.0);
    cancel_.store(false);
    finished_.store(false);
  }

  // Called by the runner.
  void set_progress(double p) noexcept {
    if (p > progress_.load(std::memory_order_relaxed)) progress_.store(p, std::memory_order_release);
  }
  void mark_finished() noexcept { finished_.store(true, std::memory_order_release); }

 private:
  std::atomic<double> progress_{0.0};
  std::atomic<bool> cancel_{false};
  std::atomic<bool> finished_{false};
};

struct ExecutionMode {
  bool one_shot = false;
  std::size_t block_frames = 0;

  bool operator==(const ExecutionMode&) const = default;
};

struct OfflineOptions {
  ResamplerKind resampler = ResamplerKind::Hermite;
  double one_shot_cap_seconds = 60.0;
  int out_channels = 0;  // 0: follow the first input track (or the model for generators)
};

/// One call for the whole signal when the processor accepts any size and the
/// signal fits under the cap; otherwise fixed blocks (the largest native size,
/// or cap-length blocks for any-size processors).
inline ExecutionMode one_shot_or_blockwise(const OfflineCapabilities& caps, SampleRate f_model,
                                           std::size_t total_frames, double cap_seconds = 60.0) {
  const auto cap_frames =
      static_cast<std::size_t>(std::max(1.0, std::floor(cap_seconds * static_cast<double>(f_model.hz()))));
  if (caps.native_buffer_sizes.is_any()) {
    if (total_frames <= cap_frames) return {true, std::max<std::size_t>(total_frames, 1)};
    return {false, cap_frames};
  }
  return {false, caps.native_buffer_sizes.values().back()};
}

/// Pads, segments, runs and re-assembles a whole multi-track job.
///
/// Tracks are converted to the model rate with latency-free interpolation,
/// zero-padded to cover the model delay plus a whole number of blocks,
/// processed in order, trimmed of the model delay at the head and the padding
/// at the tail, and converted back. With input tracks, every output track
/// has the input length. Cancellation is honoured between blocks and throws
/// Cancelled without returning partial output.
inline std::vector<AudioBlock> run_offline(OfflineProcessor& p, std::span<const AudioBlock> inputs, SampleRate f_host,
                                           std::span<const ParameterValue> params, RunHandle& handle,
                                           const OfflineOptions& options = {}) {
  const auto& caps = p.capabilities();
  validate_offline_capabilities(caps);
  const auto specs = p.parameter_specs();
  validate_parameter_specs(specs, false);
  if (inputs.size() != caps.in_track_channels.size())
    shape_mismatch("input track count", caps.in_track_channels.size(), inputs.size());
  if (!params.empty() && params.size() != specs.size()) shape_mismatch("parameter count", specs.size(), params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (std::holds_alternative<ContinuousCurve>(params[i]))
      fail(ErrorKind::ParameterDomain, "offline runs take scalar controls, not curves");
    check_parameter_value(specs[i], params[i], 0);
  }
  const std::vector<ParameterValue> run_params =
      params.empty() ? default_parameter_values(specs) : std::vector<ParameterValue>(params.begin(), params.end());

  const bool generator = inputs.empty();
  const SampleRate f_model = select_sample_rate(caps.native_sample_rates, f_host);
  std::size_t host_frames = 0;
  for (const auto& t : inputs) host_frames = std::max(host_frames, t.frames());

  const auto to_model_frames = [&](std::size_t n) {
    return static_cast<std::size_t>(detail::ceil_div(static_cast<std::uint64_t>(n) * f_model.hz(), f_host.hz()));
  };
  const auto to_host_frames = [&](std::size_t n) {
    return static_cast<std::size_t>(detail::ceil_div(static_cast<std::uint64_t>(n) * f_host.hz(), f_model.hz()));
  };
  const std::size_t model_frames = generator ? caps.generated_frames : to_model_frames(host_frames);
  const std::size_t out_host_frames = generator ? to_host_frames(model_frames) : host_frames;
  const std::size_t delay = caps.delay_samples;

  // Input tracks at model rate, channel-normalised, padded.
  const ExecutionMode mode =
      one_shot_or_blockwise(caps, f_model, model_frames + delay, options.one_shot_cap_seconds);
  const std::size_t block = mode.block_frames;
  const std::size_t padded = std::max<std::size_t>(1, detail::ceil_div(model_frames + delay, block)) * block;
  const std::size_t n_blocks = padded / block;

  auto convert = [&](std::span<const float> x, SampleRate from, SampleRate to, std::size_t n) {
    return options.resampler == ResamplerKind::Linear ? resample_aligned<LinearKernel>(x, from, to, n)
                                                      : resample_aligned<HermiteKernel>(x, from, to, n);
  };

  std::vector<AudioBlock> model_inputs;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const int want = caps.in_track_channels[t];
    AudioBlock host_track(inputs[t].channels(), host_frames);
    for (int c = 0; c < inputs[t].channels(); ++c)
      std::copy(inputs[t].channel(c).begin(), inputs[t].channel(c).end(), host_track.channel(c).begin());
    AudioBlock norm(want, host_frames);
    remap_channels(host_track.samples().data(), host_track.channels(), norm.samples().data(), want, host_frames);
    AudioBlock track(want, padded);
    for (int c = 0; c < want; ++c) {
      const auto conv = convert(norm.channel(c), f_host, f_model, model_frames);
      std::copy(conv.begin(), conv.end(), track.channel(c).begin());
    }
    model_inputs.push_back(std::move(track));
  }

  std::vector<AudioBlock> in_blocks;
  for (std::size_t t = 0; t < model_inputs.size(); ++t) in_blocks.emplace_back(caps.in_track_channels[t], block);
  std::vector<AudioBlock> out_blocks;
  std::vector<AudioBlock> model_outputs;
  for (int ch : caps.out_track_channels) {
    out_blocks.emplace_back(ch, block);
    model_outputs.emplace_back(ch, padded);
  }

  p.begin_run(f_model, block, run_params);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    if (handle.cancel_requested()) fail(ErrorKind::Cancelled, "run cancelled after " + std::to_string(b) + " blocks");
    const std::size_t start = b * block;
    for (std::size_t t = 0; t < in_blocks.size(); ++t)
      for (int c = 0; c < in_blocks[t].channels(); ++c) {
        const auto src = model_inputs[t].channel(c).subspan(start, block);
        std::copy(src.begin(), src.end(), in_blocks[t].channel(c).begin());
      }
    for (auto& ob : out_blocks) ob.clear();
    p.process(in_blocks, out_blocks);
    for (std::size_t t = 0; t < out_blocks.size(); ++t) {
      if (out_blocks[t].channels() != caps.out_track_channels[t] || out_blocks[t].frames() != block)
        shape_mismatch("offline output block frames", block, out_blocks[t].frames());
      for (int c = 0; c < out_blocks[t].channels(); ++c)
        std::copy(out_blocks[t].channel(c).begin(), out_blocks[t].channel(c).end(),
                  model_outputs[t].channel(c).begin() + static_cast<std::ptrdiff_t>(start));
    }
    handle.set_progress(static_cast<double>(b + 1) / static_cast<double>(n_blocks));
  }

  const int host_channels = options.out_channels > 0 ? options.out_channels : (generator ? 0 : inputs.front().channels());
  std::vector<AudioBlock> results;
  for (std::size_t t = 0; t < model_outputs.size(); ++t) {
    const int mch = caps.out_track_channels[t];
    AudioBlock trimmed(mch, out_host_frames);
    for (int c = 0; c < mch; ++c) {
      const auto aligned = model_outputs[t].channel(c).subspan(delay, model_frames);
      const auto back = convert(aligned, f_model, f_host, out_host_frames);
      std::copy(back.begin(), back.end(), trimmed.channel(c).begin());
    }
    const int want = host_channels > 0 ? host_channels : mch;
    AudioBlock out(want, out_host_frames);
    remap_channels(trimmed.samples().data(), mch, out.samples().data(), want, out_host_frames);
    results.push_back(std::move(out));
  }
  handle.set_progress(1.0);
  handle.mark_finished();
  return results;
}

/// Presents a RealtimeProcessor as a one-track offline processor, carrying
/// its lookbehind history across blocks.
class RealtimeAsOffline final : public OfflineProcessor {
 public:
  explicit RealtimeAsOffline(std::unique_ptr<RealtimeProcessor> rt) : rt_(std::move(rt)) {
    const auto& c = rt_->capabilities();
    caps_.in_track_channels = {c.in_channels};
    caps_.out_track_channels = {c.out_channels};
    caps_.native_buffer_sizes = c.native_buffer_sizes;
    caps_.native_sample_rates = c.native_sample_rates;
    caps_.delay_samples = c.delay_samples;
  }

  const OfflineCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return rt_->parameter_specs(); }
  const ModelMetadata& metadata() const override { return rt_->metadata(); }

  void begin_run(SampleRate rate, std::size_t block, std::span<const ParameterValue> params) override {
    params_.assign(params.begin(), params.end());
    rt_->prepare(rate, block);
    rt_->reset();
    const std::size_t lb = rt_->capabilities().lookbehind_samples;
    staging_ = AudioBlock(rt_->capabilities().in_channels, lb + block);
  }

  void process(std::span<const AudioBlock> inputs, std::span<AudioBlock> outputs) override {
    const std::size_t lb = rt_->capabilities().lookbehind_samples;
    const std::size_t n = inputs[0].frames();
    for (int c = 0; c < staging_.channels(); ++c) {
      auto s = staging_.channel(c);
      std::copy(s.begin() + static_cast<std::ptrdiff_t>(n), s.end(), s.begin());  // slide lookbehind
      const auto in = inputs[0].channel(c);
      std::copy(in.begin(), in.end(), s.begin() + static_cast<std::ptrdiff_t>(lb));
    }
    rt_->process(staging_, params_, outputs[0]);
  }

 private:
  std::unique_ptr<RealtimeProcessor> rt_;
  OfflineCapabilities caps_;
  std::vector<ParameterValue> params_;
  AudioBlock staging_;
};

}  // namespace adaptkit
