// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaptkit/core.hpp"

namespace adaptkit {

/// A set of natively supported values, or "any value".
template <typename T>
class NativeSet {
 public:
  static NativeSet any() { return NativeSet(); }

  static NativeSet of(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    NativeSet s;
    s.values_ = std::move(values);
    return s;
  }

  bool is_any() const noexcept { return !values_.has_value(); }
  const std::vector<T>& values() const { return *values_; }

  bool contains(const T& v) const {
    return is_any() || std::binary_search(values_->begin(), values_->end(), v);
  }

  bool operator==(const NativeSet&) const = default;

 private:
  std::optional<std::vector<T>> values_;
};

using BufferSizeSet = NativeSet<std::size_t>;
using SampleRateSet = NativeSet<SampleRate>;

/// How a per-sample control curve collapses to one value per model call.
enum class Aggregation { Mean, Last, Nearest };

inline const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Mean: return "mean";
    case Aggregation::Last: return "last";
    case Aggregation::Nearest: return "nearest";
  }
  return "mean";
}

struct ProcessorCapabilities {
  int in_channels = 1;
  int out_channels = 1;
  BufferSizeSet native_buffer_sizes = BufferSizeSet::any();
  SampleRateSet native_sample_rates = SampleRateSet::any();
  std::size_t delay_samples = 0;       // at model rate
  std::size_t lookbehind_samples = 0;  // at model rate
  Aggregation aggregation = Aggregation::Mean;

  bool operator==(const ProcessorCapabilities&) const = default;
};

inline void validate_capabilities(const ProcessorCapabilities& caps) {
  auto mono_or_stereo = [](int c) { return c == 1 || c == 2; };
  if (!mono_or_stereo(caps.in_channels) || !mono_or_stereo(caps.out_channels))
    fail(ErrorKind::UnsupportedChannelCount, "realtime processors take 1 or 2 channels in and out");
  if (!caps.native_buffer_sizes.is_any()) {
    if (caps.native_buffer_sizes.values().empty()) fail(ErrorKind::InvalidConfig, "empty native buffer size set");
    if (caps.native_buffer_sizes.values().front() == 0)
      fail(ErrorKind::InvalidConfig, "native buffer sizes must be positive");
  }
  if (!caps.native_sample_rates.is_any() && caps.native_sample_rates.values().empty())
    fail(ErrorKind::InvalidConfig, "empty native sample rate set");
}

/// A fixed-shape streaming audio processor.
///
/// The wrapper calls prepare() once per stream configuration, then process()
/// with exactly lookbehind + model_frames input frames and an output block
/// already shaped to out_channels x model_frames. process() and reset() must
/// not allocate. Parameter values arrive one per spec, already aggregated to
/// ContinuousScalar / CategoricalIndex.
class RealtimeProcessor {
 public:
  virtual ~RealtimeProcessor() = default;

  virtual const ProcessorCapabilities& capabilities() const = 0;
  virtual std::span<const ParameterSpec> parameter_specs() const = 0;
  virtual const ModelMetadata& metadata() const = 0;

  virtual void prepare(SampleRate /*model_rate*/, std::size_t /*model_frames*/) {}
  virtual void process(const AudioBlock& input, std::span<const ParameterValue> params, AudioBlock& output) = 0;
  virtual void reset() {}
};

namespace detail {

inline void check_process_shapes(const ProcessorCapabilities& caps, const AudioBlock& input, const AudioBlock& output) {
  if (input.channels() != caps.in_channels) shape_mismatch("processor input channels", caps.in_channels, input.channels());
  if (output.channels() != caps.out_channels)
    shape_mismatch("processor output channels", caps.out_channels, output.channels());
  if (input.frames() != output.frames() + caps.lookbehind_samples)
    shape_mismatch("processor input frames", output.frames() + caps.lookbehind_samples, input.frames());
}

inline float scalar_param(std::span<const ParameterValue> params, std::size_t i, float fallback) {
  if (i >= params.size()) return fallback;
  if (const auto* s = std::get_if<ContinuousScalar>(&params[i])) return s->value;
  if (const auto* k = std::get_if<CategoricalIndex>(&params[i])) return static_cast<float>(k->index);
  return fallback;
}

}  // namespace detail

}  // namespace adaptkit
