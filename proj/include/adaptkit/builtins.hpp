// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "adaptkit/core.hpp"
#include "adaptkit/dsp/tcn.hpp"
#include "adaptkit/processor.hpp"

namespace adaptkit {

/// Shared storage for processors whose descriptors never change.
class BasicProcessor : public RealtimeProcessor {
 public:
  BasicProcessor(ProcessorCapabilities caps, std::vector<ParameterSpec> specs, ModelMetadata meta)
      : caps_(std::move(caps)), specs_(std::move(specs)), meta_(std::move(meta)) {
    validate_capabilities(caps_);
    validate_parameter_specs(specs_, true);
    validate_metadata(meta_);
  }

  const ProcessorCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return specs_; }
  const ModelMetadata& metadata() const override { return meta_; }

 protected:
  ProcessorCapabilities caps_;
  std::vector<ParameterSpec> specs_;
  ModelMetadata meta_;
};

namespace detail {

inline ModelMetadata describe(std::string name, std::string description) {
  ModelMetadata m;
  m.name = std::move(name);
  m.description = std::move(description);
  return m;
}

}  // namespace detail

/// Passes the newest frames through untouched.
class IdentityProcessor final : public BasicProcessor {
 public:
  explicit IdentityProcessor(ProcessorCapabilities caps)
      : BasicProcessor(std::move(caps), {}, detail::describe("identity", "Pass-through")) {}

  void process(const AudioBlock& in, std::span<const ParameterValue>, AudioBlock& out) override {
    detail::check_process_shapes(caps_, in, out);
    const std::size_t lb = caps_.lookbehind_samples;
    for (int c = 0; c < out.channels(); ++c) {
      const auto src = in.channel(c % in.channels()).subspan(lb);
      std::copy(src.begin(), src.end(), out.channel(c).begin());
    }
  }
};

/// Linear gain: the "gain" parameter is the amplitude factor.
class GainProcessor final : public BasicProcessor {
 public:
  explicit GainProcessor(ProcessorCapabilities caps)
      : BasicProcessor(std::move(caps), {ContinuousSpec{"gain", "Linear amplitude", 1.0}},
                       detail::describe("gain", "Linear gain")) {}

  void process(const AudioBlock& in, std::span<const ParameterValue> params, AudioBlock& out) override {
    detail::check_process_shapes(caps_, in, out);
    const float g = detail::scalar_param(params, 0, 1.0f);
    const std::size_t lb = caps_.lookbehind_samples;
    for (int c = 0; c < out.channels(); ++c) {
      const auto src = in.channel(c % in.channels()).subspan(lb);
      auto dst = out.channel(c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = g * src[i];
    }
  }
};

/// Normalised tanh saturation, y = tanh(g x) / tanh(g) with g = 1 + 9 * drive.
class ClipperProcessor final : public BasicProcessor {
 public:
  explicit ClipperProcessor(ProcessorCapabilities caps)
      : BasicProcessor(std::move(caps), {ContinuousSpec{"drive", "Saturation drive", 0.0}},
                       detail::describe("clipper", "Tanh soft clipper")) {}

  static float shape(float x, float drive) noexcept {
    const float g = 1.0f + 9.0f * drive;
    return std::tanh(g * x) / std::tanh(g);
  }

  void process(const AudioBlock& in, std::span<const ParameterValue> params, AudioBlock& out) override {
    detail::check_process_shapes(caps_, in, out);
    const float drive = detail::scalar_param(params, 0, 0.0f);
    const std::size_t lb = caps_.lookbehind_samples;
    for (int c = 0; c < out.channels(); ++c) {
      const auto src = in.channel(c % in.channels()).subspan(lb);
      auto dst = out.channel(c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = shape(src[i], drive);
    }
  }
};

/// Pure delay of `delay` frames; reports that delay honestly.
class DelayLineProcessor final : public BasicProcessor {
 public:
  DelayLineProcessor(ProcessorCapabilities caps, std::size_t delay)
      : BasicProcessor(with_delay(std::move(caps), delay), {},
                       detail::describe("delayline", "Pure delay")),
        delay_(delay),
        ring_(static_cast<std::size_t>(caps_.in_channels) * delay, 0.0f) {}

  void process(const AudioBlock& in, std::span<const ParameterValue>, AudioBlock& out) override {
    detail::check_process_shapes(caps_, in, out);
    const std::size_t lb = caps_.lookbehind_samples;
    const std::size_t n = out.frames();
    std::size_t pos = pos_;
    for (int c = 0; c < in.channels(); ++c) {
      const auto src = in.channel(c).subspan(lb);
      auto dst = out.channel(c % out.channels());
      if (delay_ == 0) {
        std::copy(src.begin(), src.end(), dst.begin());
        continue;
      }
      float* ring = ring_.data() + static_cast<std::size_t>(c) * delay_;
      pos = pos_;
      for (std::size_t i = 0; i < n; ++i) {
        dst[i] = ring[pos];
        ring[pos] = src[i];
        if (++pos == delay_) pos = 0;
      }
    }
    for (int c = in.channels(); c < out.channels(); ++c) {
      auto first = out.channel(0);
      std::copy(first.begin(), first.end(), out.channel(c).begin());
    }
    pos_ = pos;
  }

  void reset() override {
    std::fill(ring_.begin(), ring_.end(), 0.0f);
    pos_ = 0;
  }

 private:
  static ProcessorCapabilities with_delay(ProcessorCapabilities caps, std::size_t d) {
    caps.delay_samples = d;
    return caps;
  }

  std::size_t delay_;
  std::vector<float> ring_;
  std::size_t pos_ = 0;
};

/// Runs a TcnStack statelessly over lookbehind + block, using a lookbehind of
/// receptive_field - 1 so every output sees its full context. Condition
/// inputs come from continuous parameters cond0..cond{N-1}.
class TcnProcessor final : public BasicProcessor {
 public:
  TcnProcessor(ProcessorCapabilities caps, dsp::TcnWeights weights)
      : BasicProcessor(tcn_caps(std::move(caps), weights), tcn_specs(weights),
                       detail::describe("tcn", "Temporal convolutional network")),
        weights_(std::move(weights)),
        condition_(static_cast<std::size_t>(weights_.condition_dim), 0.0f) {}

  const dsp::TcnWeights& weights() const noexcept { return weights_; }

  void prepare(SampleRate, std::size_t model_frames) override {
    const std::size_t total = model_frames + caps_.lookbehind_samples;
    stack_ = dsp::TcnStack(weights_, total);
    scratch_ = AudioBlock(weights_.out_channels, total);
  }

  void process(const AudioBlock& in, std::span<const ParameterValue> params, AudioBlock& out) override {
    detail::check_process_shapes(caps_, in, out);
    if (in.frames() > stack_.max_frames()) fail(ErrorKind::NotPrepared, "TCN processor not prepared for this size");
    for (std::size_t i = 0; i < condition_.size(); ++i) condition_[i] = detail::scalar_param(params, i, 0.0f);
    stack_.set_condition(condition_);
    stack_.reset();
    scratch_.set_frames(in.frames());
    stack_.process(in.samples().data(), in.frames(), scratch_.samples().data());
    const std::size_t lb = caps_.lookbehind_samples;
    for (int c = 0; c < out.channels(); ++c) {
      const auto src = scratch_.channel(c).subspan(lb);
      std::copy(src.begin(), src.end(), out.channel(c).begin());
    }
  }

  void reset() override { stack_.reset(); }

 private:
  static ProcessorCapabilities tcn_caps(ProcessorCapabilities caps, const dsp::TcnWeights& w) {
    w.validate();
    if (w.in_channels > 2 || w.out_channels > 2)
      fail(ErrorKind::InvalidConfig, "realtime TCN must be mono or stereo at both ends");
    caps.in_channels = w.in_channels;
    caps.out_channels = w.out_channels;
    caps.delay_samples = 0;
    caps.lookbehind_samples = w.receptive_field() - 1;
    return caps;
  }

  static std::vector<ParameterSpec> tcn_specs(const dsp::TcnWeights& w) {
    std::vector<ParameterSpec> specs;
    for (int i = 0; i < w.condition_dim; ++i)
      specs.emplace_back(ContinuousSpec{"cond" + std::to_string(i), "FiLM condition input", 0.0});
    return specs;
  }

  dsp::TcnWeights weights_;
  std::vector<float> condition_;
  dsp::TcnStack stack_;
  AudioBlock scratch_;
};

// ---------------------------------------------------------------------------
// Factory
// ---------------------------------------------------------------------------

enum class BuiltinKind { Identity, Gain, Clipper, DelayLine, Tcn };

struct BuiltinSpec {
  BuiltinKind kind = BuiltinKind::Identity;
  std::size_t delay = 0;   // DelayLine only
  dsp::TcnWeights tcn;     // Tcn only
  int channels = 1;
  BufferSizeSet native_buffer_sizes = BufferSizeSet::any();
  SampleRateSet native_sample_rates = SampleRateSet::any();
};

inline const char* to_string(BuiltinKind k) {
  switch (k) {
    case BuiltinKind::Identity: return "identity";
    case BuiltinKind::Gain: return "gain";
    case BuiltinKind::Clipper: return "clipper";
    case BuiltinKind::DelayLine: return "delayline";
    case BuiltinKind::Tcn: return "tcn";
  }
  return "identity";
}

/// Small randomly initialised TCN (seeded) for demos and tests.
inline dsp::TcnWeights demo_tcn_weights(int channels = 1, int hidden = 2, std::vector<int> dilations = {1, 2, 4},
                                        int kernel_size = 3, int condition_dim = 1, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](float scale) {
    return scale * (static_cast<float>(rng() >> 11) * 0x1.0p-53f * 2.0f - 1.0f);
  };
  dsp::TcnWeights w;
  w.in_channels = channels;
  w.out_channels = channels;
  w.condition_dim = condition_dim;
  int prev = channels;
  for (std::size_t b = 0; b < dilations.size(); ++b) {
    dsp::TcnBlockWeights blk;
    blk.kernel_size = kernel_size;
    blk.dilation = dilations[b];
    blk.channels = b + 1 == dilations.size() ? channels : hidden;
    blk.weights.resize(static_cast<std::size_t>(blk.channels) * prev * kernel_size);
    for (auto& v : blk.weights) v = uniform(0.5f);
    blk.bias.resize(static_cast<std::size_t>(blk.channels));
    for (auto& v : blk.bias) v = uniform(0.1f);
    blk.film = dsp::TcnWeights::identity_film(blk.channels, condition_dim);
    for (auto& v : blk.film) v += uniform(0.1f);
    w.blocks.push_back(std::move(blk));
    prev = w.blocks.back().channels;
  }
  return w;
}

inline std::unique_ptr<RealtimeProcessor> make_builtin(const BuiltinSpec& spec) {
  ProcessorCapabilities caps;
  caps.in_channels = spec.channels;
  caps.out_channels = spec.channels;
  caps.native_buffer_sizes = spec.native_buffer_sizes;
  caps.native_sample_rates = spec.native_sample_rates;
  switch (spec.kind) {
    case BuiltinKind::Identity: return std::make_unique<IdentityProcessor>(caps);
    case BuiltinKind::Gain: return std::make_unique<GainProcessor>(caps);
    case BuiltinKind::Clipper: return std::make_unique<ClipperProcessor>(caps);
    case BuiltinKind::DelayLine: return std::make_unique<DelayLineProcessor>(caps, spec.delay);
    case BuiltinKind::Tcn: return std::make_unique<TcnProcessor>(caps, spec.tcn);
  }
  fail(ErrorKind::InvalidConfig, "unknown builtin kind");
}

/// Parses "identity", "gain", "clipper", "delayline:<d>", "tcn".
inline BuiltinSpec parse_builtin(const std::string& text) {
  BuiltinSpec spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "identity") spec.kind = BuiltinKind::Identity;
  else if (head == "gain") spec.kind = BuiltinKind::Gain;
  else if (head == "clipper") spec.kind = BuiltinKind::Clipper;
  else if (head == "tcn") {
    spec.kind = BuiltinKind::Tcn;
    spec.tcn = demo_tcn_weights();
  } else if (head == "delayline") {
    spec.kind = BuiltinKind::DelayLine;
    if (colon == std::string::npos) fail(ErrorKind::InvalidConfig, "delayline needs a length, e.g. delayline:64");
    try {
      const long d = std::stol(text.substr(colon + 1));
      if (d < 0) throw std::out_of_range("negative");
      spec.delay = static_cast<std::size_t>(d);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidConfig, "bad delayline length in '" + text + "'");
    }
  } else {
    fail(ErrorKind::InvalidConfig, "unknown builtin '" + text + "'");
  }
  if (colon != std::string::npos && spec.kind != BuiltinKind::DelayLine)
    fail(ErrorKind::InvalidConfig, "builtin '" + head + "' takes no argument");
  return spec;
}

}  // namespace adaptkit
