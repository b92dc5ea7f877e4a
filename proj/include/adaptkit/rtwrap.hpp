// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "adaptkit/adapt.hpp"
#include "adaptkit/circular_queue.hpp"
#include "adaptkit/core.hpp"
#include "adaptkit/processor.hpp"
#include "adaptkit/resampler.hpp"
#include "adaptkit/sandwich.hpp"

namespace adaptkit {

/// Collapses one model window of a control lane to a single value.
/// Nearest picks index size/2, i.e. the later sample on an even-length tie.
inline float aggregate_params(std::span<const float> window, Aggregation policy) {
  if (window.empty()) return 0.0f;
  switch (policy) {
    case Aggregation::Mean: {
      double sum = 0.0;
      for (float v : window) sum += v;
      return static_cast<float>(sum / static_cast<double>(window.size()));
    }
    case Aggregation::Last: return window.back();
    case Aggregation::Nearest: return window[window.size() / 2];
  }
  return window.back();
}

struct DelayReport {
  std::size_t total_daw_samples = 0;
  std::size_t buffering = 0;      // model rate
  std::size_t buffering_daw = 0;  // host rate
  std::size_t model = 0;          // model rate
  std::size_t resample_in = 0;    // host rate
  std::size_t resample_out = 0;   // model rate

  bool operator==(const DelayReport&) const = default;
};

struct WrapperStats {
  std::uint64_t callbacks = 0;
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t model_calls = 0;
  std::uint64_t underflows = 0;
  std::size_t max_input_fill = 0;
  std::size_t max_output_fill = 0;

  bool operator==(const WrapperStats&) const = default;
};

/// Runs a fixed-shape RealtimeProcessor inside a host with arbitrary buffer
/// size, sample rate and channel count.
///
/// Per host buffer: channel-normalise, resample to the model rate, queue;
/// run the processor on every complete model block (with lookbehind prefix
/// and aggregated controls); resample back, queue at host rate; pop exactly
/// one host buffer. The host-rate output queue starts with silence equal to
/// the planned buffering delay, which is what keeps every pop satisfiable.
///
/// All storage is created in prepare(); process_buffer() does not allocate
/// provided `out` already has capacity for c_daw * n_daw samples.
class RealtimeWrapper {
 public:
  explicit RealtimeWrapper(std::unique_ptr<RealtimeProcessor> processor,
                           ResamplerKind kind = ResamplerKind::Hermite)
      : processor_(std::move(processor)), kind_(kind) {
    if (!processor_) fail(ErrorKind::InvalidConfig, "wrapper needs a processor");
    validate_capabilities(processor_->capabilities());
    validate_parameter_specs(processor_->parameter_specs(), true);
    specs_.assign(processor_->parameter_specs().begin(), processor_->parameter_specs().end());
    defaults_ = default_parameter_values(specs_);
  }

  RealtimeProcessor& processor() noexcept { return *processor_; }
  const RealtimeProcessor& processor() const noexcept { return *processor_; }
  ResamplerKind resampler_kind() const noexcept { return kind_; }
  bool prepared() const noexcept { return cfg_.has_value(); }

  const StreamConfig& config() const {
    if (!cfg_) fail(ErrorKind::NotPrepared, "wrapper not prepared");
    return *cfg_;
  }

  DelayReport delay_report() const {
    const auto& c = config();
    return DelayReport{c.d_total_daw, c.d_buffering, c.d_buffering_daw, c.d_model, c.d_resample_in, c.d_resample_out};
  }

  const WrapperStats& stats() const noexcept { return stats_; }

  std::size_t input_fill() const noexcept { return input_q_.fill(); }
  std::size_t output_fill() const noexcept { return output_q_.fill(); }
  /// Model-rate frames produced by the input resampler since reset().
  std::uint64_t resampled_in_total() const noexcept { return in_resampler_.total_outputs(); }
  /// Host-rate frames produced by the output resampler since reset().
  std::uint64_t resampled_out_total() const noexcept { return out_resampler_.total_outputs(); }

  /// (Re)configures for a host stream. Equivalent to a fresh wrapper.
  DelayReport prepare(SampleRate f_daw, std::size_t n_daw, int c_daw) {
    const auto& caps = processor_->capabilities();
    StreamConfig cfg = plan_stream(caps, f_daw, n_daw, c_daw, kind_);

    const int cin = caps.in_channels;
    const int cout = caps.out_channels;
    const std::size_t lanes = specs_.size();

    normalizer_ = ChannelNormalizer(c_daw, cin, cout);
    in_resampler_ = make_audio_resampler(kind_, cin, cfg.f_daw, cfg.f_model);
    out_resampler_ = make_audio_resampler(kind_, cout, cfg.f_model, cfg.f_daw);
    if (lanes > 0) control_resampler_ = make_control_resampler(kind_, static_cast<int>(lanes), cfg.f_daw, cfg.f_model);

    input_q_ = CircularQueue(cin, cfg.input_queue_capacity);
    output_q_ = CircularQueue(cout, cfg.output_queue_capacity);
    param_q_ = CircularQueue(std::max<int>(1, static_cast<int>(lanes)), lanes > 0 ? cfg.input_queue_capacity : 0);
    lookbehind_q_ = CircularQueue(cin, cfg.lookbehind);

    model_in_stride_ = in_resampler_.max_output(n_daw);
    host_out_stride_ = out_resampler_.max_output(cfg.n_model);
    host_in_ = AudioBlock(cin, n_daw);
    model_in_ = AudioBlock(cin, model_in_stride_);
    staging_ = AudioBlock(cin, cfg.lookbehind + cfg.n_model);
    model_out_ = AudioBlock(cout, cfg.n_model);
    host_out_.assign(static_cast<std::size_t>(cout) * host_out_stride_, 0.0f);
    popped_ = AudioBlock(cout, n_daw);
    param_host_.assign(lanes * n_daw, 0.0f);
    param_model_.assign(lanes * model_in_stride_, 0.0f);
    param_window_.assign(lanes * cfg.n_model, 0.0f);
    aggregated_ = defaults_;
    for (auto& v : aggregated_)
      if (std::holds_alternative<TextValue>(v)) v = ContinuousScalar{0.0f};

    cfg_ = cfg;
    processor_->prepare(cfg.f_model, cfg.n_model);
    reset();
    return delay_report();
  }

  /// Clears all streaming state; configuration is kept.
  void reset() {
    if (!cfg_) fail(ErrorKind::NotPrepared, "reset before prepare");
    input_q_.clear();
    output_q_.clear();
    param_q_.clear();
    lookbehind_q_.clear();
    lookbehind_q_.push_silence(cfg_->lookbehind);
    output_q_.push_silence(cfg_->d_buffering_daw);
    in_resampler_.reset();
    out_resampler_.reset();
    control_resampler_.reset();
    processor_->reset();
    stats_ = WrapperStats{};
    stats_.max_output_fill = output_q_.fill();
  }

  /// Processes one host buffer. `params` holds one value per parameter spec
  /// (or is empty, meaning defaults). Curves must be n_daw long.
  void process_buffer(const AudioBlock& input, std::span<const ParameterValue> params, AudioBlock& output) {
    if (!cfg_) fail(ErrorKind::NotPrepared, "process_buffer before prepare");
    const StreamConfig& cfg = *cfg_;
    if (input.channels() != cfg.c_daw) shape_mismatch("host input channels", cfg.c_daw, input.channels());
    if (input.frames() != cfg.n_daw) shape_mismatch("host input frames", cfg.n_daw, input.frames());
    if (!params.empty() && params.size() != specs_.size()) shape_mismatch("parameter count", specs_.size(), params.size());
    for (std::size_t p = 0; p < params.size(); ++p) check_parameter_value(specs_[p], params[p], cfg.n_daw);

    normalizer_.normalize_in(input, host_in_);
    model_in_.resize(host_in_.channels(), model_in_stride_);
    const std::size_t produced =
        in_resampler_.process(host_in_.samples().data(), cfg.n_daw, cfg.n_daw, model_in_.samples().data(), model_in_stride_);

    const std::size_t lanes = specs_.size();
    if (lanes > 0) {
      fill_control_lanes(params.empty() ? std::span<const ParameterValue>(defaults_) : params);
      const std::size_t got = control_resampler_.process(param_host_.data(), cfg.n_daw, cfg.n_daw, param_model_.data(),
                                                         model_in_stride_);
      if (got != produced) fail(ErrorKind::InvalidConfig, "control lanes drifted from audio");
      param_q_.push(param_model_.data(), model_in_stride_, 0, produced);
    }
    input_q_.push(model_in_.samples().data(), model_in_stride_, 0, produced);
    stats_.max_input_fill = std::max(stats_.max_input_fill, input_q_.fill());

    while (input_q_.fill() >= cfg.n_model) run_model_block();

    stats_.max_output_fill = std::max(stats_.max_output_fill, output_q_.fill());
    if (!output_q_.pop(popped_, 0, cfg.n_daw)) {
      // Planning guarantees this never happens; count it and emit what exists.
      ++stats_.underflows;
      const std::size_t have = output_q_.fill();
      popped_.clear();
      output_q_.pop(popped_, 0, have);
    }
    normalizer_.normalize_out(popped_, output);

    ++stats_.callbacks;
    stats_.frames_in += cfg.n_daw;
    stats_.frames_out += output.frames();
  }

  AudioBlock process_buffer(const AudioBlock& input, std::span<const ParameterValue> params = {}) {
    AudioBlock out(config().c_daw, config().n_daw);
    process_buffer(input, params, out);
    return out;
  }

  /// Whole-signal convenience: streams `input` through in n_daw buffers,
  /// then drops the reported delay so the result lines up with the input.
  AudioBlock process_offline(const AudioBlock& input, std::span<const ParameterValue> params, SampleRate f_daw,
                             std::size_t n_daw) {
    const DelayReport report = prepare(f_daw, n_daw, input.channels());
    const std::size_t total = input.frames();
    const std::size_t needed = total + report.total_daw_samples;
    AudioBlock result(input.channels(), total);
    AudioBlock chunk(input.channels(), n_daw);
    AudioBlock out(input.channels(), n_daw);
    std::size_t consumed = 0;
    std::size_t emitted = 0;
    while (emitted < needed) {
      for (int c = 0; c < input.channels(); ++c) {
        auto dst = chunk.channel(c);
        for (std::size_t i = 0; i < n_daw; ++i) {
          const std::size_t src = consumed + i;
          dst[i] = src < total ? input.at(c, src) : 0.0f;
        }
      }
      consumed += n_daw;
      process_buffer(chunk, params, out);
      for (std::size_t i = 0; i < n_daw; ++i, ++emitted) {
        if (emitted < report.total_daw_samples) continue;
        const std::size_t dst = emitted - report.total_daw_samples;
        if (dst >= total) break;
        for (int c = 0; c < input.channels(); ++c) result.at(c, dst) = out.at(c, i);
      }
    }
    return result;
  }

 private:
  void fill_control_lanes(std::span<const ParameterValue> params) {
    const std::size_t n = cfg_->n_daw;
    for (std::size_t p = 0; p < specs_.size(); ++p) {
      float* lane = param_host_.data() + p * n;
      const ParameterValue& v = params[p];
      if (const auto* s = std::get_if<ContinuousScalar>(&v)) std::fill_n(lane, n, s->value);
      else if (const auto* curve = std::get_if<ContinuousCurve>(&v)) std::copy_n(curve->values.data(), n, lane);
      else if (const auto* k = std::get_if<CategoricalIndex>(&v)) std::fill_n(lane, n, static_cast<float>(k->index));
      else std::fill_n(lane, n, 0.0f);
    }
  }

  void run_model_block() {
    const StreamConfig& cfg = *cfg_;
    const std::size_t lb = cfg.lookbehind;
    const std::size_t n = cfg.n_model;
    if (lb > 0) lookbehind_q_.peek(staging_, 0, lb);
    input_q_.pop(staging_, lb, n);
    if (lb > 0) {
      const std::size_t keep = std::min(lb, n);
      lookbehind_q_.discard(keep);
      lookbehind_q_.push(staging_, lb + n - keep, keep);
    }

    const std::size_t lanes = specs_.size();
    if (lanes > 0) {
      param_q_.pop(param_window_.data(), n, 0, n);
      const Aggregation policy = processor_->capabilities().aggregation;
      for (std::size_t p = 0; p < lanes; ++p) {
        const std::span<const float> window(param_window_.data() + p * n, n);
        if (std::holds_alternative<CategoricalSpec>(specs_[p])) {
          const auto cat_policy = policy == Aggregation::Nearest ? Aggregation::Nearest : Aggregation::Last;
          aggregated_[p] = CategoricalIndex{static_cast<int>(std::lround(aggregate_params(window, cat_policy)))};
        } else {
          aggregated_[p] = ContinuousScalar{aggregate_params(window, policy)};
        }
      }
    }

    processor_->process(staging_, aggregated_, model_out_);
    ++stats_.model_calls;

    const std::size_t m = out_resampler_.process(model_out_.samples().data(), n, n, host_out_.data(), host_out_stride_);
    output_q_.push(host_out_.data(), host_out_stride_, 0, m);
  }

  std::unique_ptr<RealtimeProcessor> processor_;
  ResamplerKind kind_;
  std::vector<ParameterSpec> specs_;
  std::vector<ParameterValue> defaults_;
  std::optional<StreamConfig> cfg_;

  ChannelNormalizer normalizer_;
  AudioResampler in_resampler_;
  AudioResampler out_resampler_;
  ControlResampler control_resampler_;
  CircularQueue input_q_;
  CircularQueue output_q_;
  CircularQueue param_q_;
  CircularQueue lookbehind_q_;

  std::size_t model_in_stride_ = 0;
  std::size_t host_out_stride_ = 0;
  AudioBlock host_in_;
  AudioBlock model_in_;
  AudioBlock staging_;
  AudioBlock model_out_;
  std::vector<float> host_out_;
  AudioBlock popped_;
  std::vector<float> param_host_;
  std::vector<float> param_model_;
  std::vector<float> param_window_;
  std::vector<ParameterValue> aggregated_;
  WrapperStats stats_;
};

}  // namespace adaptkit
