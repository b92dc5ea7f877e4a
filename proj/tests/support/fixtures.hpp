// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "adaptkit.hpp"

namespace fixtures {

using namespace adaptkit;

inline ProcessorCapabilities caps_of(std::vector<std::size_t> sizes = {}, std::vector<std::int64_t> rates = {},
                                     int ch = 1) {
  ProcessorCapabilities c;
  c.in_channels = ch;
  c.out_channels = ch;
  if (!sizes.empty()) c.native_buffer_sizes = BufferSizeSet::of(sizes);
  if (!rates.empty()) {
    std::vector<SampleRate> r;
    for (auto v : rates) r.emplace_back(v);
    c.native_sample_rates = SampleRateSet::of(r);
  }
  return c;
}

inline ModelMetadata meta(const char* name) {
  ModelMetadata m;
  m.name = name;
  return m;
}

/// Identity that burns wall time on every call.
class SleepProcessor final : public RealtimeProcessor {
 public:
  SleepProcessor(ProcessorCapabilities caps, std::chrono::microseconds per_call)
      : caps_(std::move(caps)), per_call_(per_call), meta_(meta("sleep")) {}
  const ProcessorCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return {}; }
  const ModelMetadata& metadata() const override { return meta_; }
  void process(const AudioBlock& in, std::span<const ParameterValue>, AudioBlock& out) override {
    std::this_thread::sleep_for(per_call_);
    std::copy_n(in.samples().begin(), out.samples().size(), out.samples().begin());
  }

 private:
  ProcessorCapabilities caps_;
  std::chrono::microseconds per_call_;
  ModelMetadata meta_;
};

/// Does `work` multiply-adds per output sample.
class CostProcessor final : public RealtimeProcessor {
 public:
  CostProcessor(ProcessorCapabilities caps, int work) : caps_(std::move(caps)), work_(work), meta_(meta("cost")) {}
  const ProcessorCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return {}; }
  const ModelMetadata& metadata() const override { return meta_; }
  void process(const AudioBlock& in, std::span<const ParameterValue>, AudioBlock& out) override {
    for (int c = 0; c < out.channels(); ++c)
      for (std::size_t i = 0; i < out.frames(); ++i) {
        volatile float acc = in.at(c, i);
        for (int k = 0; k < work_; ++k) acc = acc * 0.999f + 0.001f;
        out.at(c, i) = acc;
      }
  }

 private:
  ProcessorCapabilities caps_;
  int work_;
  ModelMetadata meta_;
};

/// Positive control for the allocation audit.
class AllocatingProcessor final : public RealtimeProcessor {
 public:
  explicit AllocatingProcessor(ProcessorCapabilities caps) : caps_(std::move(caps)), meta_(meta("allocating")) {}
  const ProcessorCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return {}; }
  const ModelMetadata& metadata() const override { return meta_; }
  void process(const AudioBlock& in, std::span<const ParameterValue>, AudioBlock& out) override {
    std::vector<float> copy(in.samples().begin(), in.samples().end());
    std::copy_n(copy.begin(), out.samples().size(), out.samples().begin());
  }

 private:
  ProcessorCapabilities caps_;
  ModelMetadata meta_;
};

/// Emits input[-lookbehind]: the oldest frame of each window position.
class LookbehindEcho final : public RealtimeProcessor {
 public:
  LookbehindEcho(ProcessorCapabilities caps, std::size_t lookbehind) : caps_(std::move(caps)), meta_(meta("echo")) {
    caps_.lookbehind_samples = lookbehind;
  }
  const ProcessorCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return {}; }
  const ModelMetadata& metadata() const override { return meta_; }
  void process(const AudioBlock& in, std::span<const ParameterValue>, AudioBlock& out) override {
    for (int c = 0; c < out.channels(); ++c)
      for (std::size_t i = 0; i < out.frames(); ++i) out.at(c, i) = in.at(c, i);
  }

 private:
  ProcessorCapabilities caps_;
  ModelMetadata meta_;
};

/// Records the aggregated parameter it received on every call.
class ParamRecorder final : public RealtimeProcessor {
 public:
  ParamRecorder(ProcessorCapabilities caps, std::vector<ParameterSpec> specs)
      : caps_(std::move(caps)), specs_(std::move(specs)), meta_(meta("recorder")) {
    seen.reserve(1 << 16);
  }
  const ProcessorCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return specs_; }
  const ModelMetadata& metadata() const override { return meta_; }
  void process(const AudioBlock& in, std::span<const ParameterValue> params, AudioBlock& out) override {
    seen.push_back(params[0]);
    std::copy_n(in.samples().begin(), out.samples().size(), out.samples().begin());
  }
  std::vector<ParameterValue> seen;

 private:
  ProcessorCapabilities caps_;
  std::vector<ParameterSpec> specs_;
  ModelMetadata meta_;
};

/// One track in, four out, each a fixed gain of the input, delayed by `delay`.
class StemSplitter final : public OfflineProcessor {
 public:
  static constexpr float kGains[4] = {1.0f, 0.5f, 0.25f, -1.0f};

  explicit StemSplitter(std::vector<std::size_t> sizes = {}, std::size_t delay = 0) : meta_(meta("stems")) {
    caps_.in_track_channels = {1};
    caps_.out_track_channels = {1, 1, 1, 1};
    if (!sizes.empty()) caps_.native_buffer_sizes = BufferSizeSet::of(sizes);
    caps_.delay_samples = delay;
    line_.assign(delay, 0.0f);
  }
  const OfflineCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return {}; }
  const ModelMetadata& metadata() const override { return meta_; }
  void begin_run(SampleRate, std::size_t, std::span<const ParameterValue>) override {
    std::fill(line_.begin(), line_.end(), 0.0f);
    pos_ = 0;
  }
  void process(std::span<const AudioBlock> in, std::span<AudioBlock> out) override {
    ++calls;
    for (std::size_t i = 0; i < in[0].frames(); ++i) {
      float x = in[0].at(0, i);
      if (!line_.empty()) {
        std::swap(x, line_[pos_]);
        pos_ = (pos_ + 1) % line_.size();
      }
      for (int s = 0; s < 4; ++s) out[static_cast<std::size_t>(s)].at(0, i) = kGains[s] * x;
    }
  }
  int calls = 0;

 private:
  OfflineCapabilities caps_;
  ModelMetadata meta_;
  std::vector<float> line_;
  std::size_t pos_ = 0;
};

/// No inputs; writes a ramp 0, 1, 2, ... of declared length.
class RampGenerator final : public OfflineProcessor {
 public:
  explicit RampGenerator(std::size_t frames, std::vector<std::size_t> sizes = {}) : meta_(meta("ramp")) {
    caps_.out_track_channels = {1};
    caps_.generated_frames = frames;
    if (!sizes.empty()) caps_.native_buffer_sizes = BufferSizeSet::of(sizes);
    specs_.push_back(TextSpec{"prompt", "Text prompt", 32, "hello"});
  }
  const OfflineCapabilities& capabilities() const override { return caps_; }
  std::span<const ParameterSpec> parameter_specs() const override { return specs_; }
  const ModelMetadata& metadata() const override { return meta_; }
  void begin_run(SampleRate, std::size_t, std::span<const ParameterValue> params) override {
    prompt = std::get<TextValue>(params[0]).text;
    ++runs;
    next_ = 0;
  }
  void process(std::span<const AudioBlock>, std::span<AudioBlock> out) override {
    for (std::size_t i = 0; i < out[0].frames(); ++i) out[0].at(0, i) = static_cast<float>(next_++);
  }
  std::string prompt;
  int runs = 0;

 private:
  OfflineCapabilities caps_;
  std::vector<ParameterSpec> specs_;
  ModelMetadata meta_;
  std::size_t next_ = 0;
};

inline std::vector<float> noise(std::size_t n, std::uint64_t seed, float amp = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-amp, amp);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline AudioBlock noise_block(int ch, std::size_t n, std::uint64_t seed) {
  AudioBlock b(ch, n);
  const auto v = noise(b.samples().size(), seed);
  std::copy(v.begin(), v.end(), b.samples().begin());
  return b;
}

/// Random partition of `total` into chunks of size in [1, max_chunk].
inline std::vector<std::size_t> random_chunks(std::size_t total, std::size_t max_chunk, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> d(1, max_chunk);
  std::vector<std::size_t> out;
  for (std::size_t done = 0; done < total;) {
    const std::size_t n = std::min(total - done, d(rng));
    out.push_back(n);
    done += n;
  }
  return out;
}

}  // namespace fixtures
