// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace adaptkit {

inline constexpr int kMaxChannels = 8;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  InvalidConfig,
  ShapeMismatch,
  UnsupportedChannelCount,
  NotPrepared,
  Cancelled,
  BundleFormat,
  ParameterDomain,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::UnsupportedChannelCount: return "UnsupportedChannelCount";
    case ErrorKind::NotPrepared: return "NotPrepared";
    case ErrorKind::Cancelled: return "Cancelled";
    case ErrorKind::BundleFormat: return "BundleFormat";
    case ErrorKind::ParameterDomain: return "ParameterDomain";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind identifies which contract
/// was broken; the message carries the detail.
class AdaptError : public std::runtime_error {
 public:
  AdaptError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw AdaptError(kind, what); }

[[noreturn]] inline void shape_mismatch(const char* what, std::size_t expected, std::size_t got) {
  throw AdaptError(ErrorKind::ShapeMismatch, std::string(what) + " (expected " + std::to_string(expected) +
                                                 ", got " + std::to_string(got) + ")");
}

// ---------------------------------------------------------------------------
// Audio
// ---------------------------------------------------------------------------

/// Planar multi-channel float buffer. Sample (c, i) lives at c * frames + i.
///
/// resize() keeps the underlying storage when the new shape fits, so blocks
/// sized once up front can be reshaped on the audio thread without touching
/// the heap. Contents are unspecified after a reshape that changes the frame
/// count.
class AudioBlock {
 public:
  AudioBlock() = default;

  AudioBlock(int channels, std::size_t frames) { resize(channels, frames); }

  static AudioBlock from_channels(const std::vector<std::vector<float>>& chans) {
    if (chans.empty()) fail(ErrorKind::UnsupportedChannelCount, "no channels");
    AudioBlock b(static_cast<int>(chans.size()), chans.front().size());
    for (std::size_t c = 0; c < chans.size(); ++c) {
      if (chans[c].size() != b.frames()) shape_mismatch("channel length", b.frames(), chans[c].size());
      std::copy(chans[c].begin(), chans[c].end(), b.channel(static_cast<int>(c)).begin());
    }
    return b;
  }

  void resize(int channels, std::size_t frames) {
    if (channels < 1 || channels > kMaxChannels)
      fail(ErrorKind::UnsupportedChannelCount, "channel count " + std::to_string(channels) + " outside 1..8");
    channels_ = channels;
    frames_ = frames;
    samples_.resize(static_cast<std::size_t>(channels) * frames);
  }

  /// Reserve storage for up to `total_samples` so later resizes stay in place.
  void reserve(std::size_t total_samples) { samples_.reserve(total_samples); }

  void set_frames(std::size_t frames) { resize(channels_, frames); }

  void clear() { std::fill(samples_.begin(), samples_.end(), 0.0f); }

  int channels() const noexcept { return channels_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t capacity() const noexcept { return samples_.capacity(); }

  float& at(int c, std::size_t i) noexcept {
    assert(c >= 0 && c < channels_ && i < frames_);
    return samples_[static_cast<std::size_t>(c) * frames_ + i];
  }
  float at(int c, std::size_t i) const noexcept {
    assert(c >= 0 && c < channels_ && i < frames_);
    return samples_[static_cast<std::size_t>(c) * frames_ + i];
  }

  std::span<float> channel(int c) noexcept {
    return {samples_.data() + static_cast<std::size_t>(c) * frames_, frames_};
  }
  std::span<const float> channel(int c) const noexcept {
    return {samples_.data() + static_cast<std::size_t>(c) * frames_, frames_};
  }

  std::span<float> samples() noexcept { return samples_; }
  std::span<const float> samples() const noexcept { return samples_; }

  friend bool operator==(const AudioBlock& a, const AudioBlock& b) {
    return a.channels_ == b.channels_ && a.frames_ == b.frames_ && a.samples_ == b.samples_;
  }

 private:
  int channels_ = 1;
  std::size_t frames_ = 0;
  std::vector<float> samples_;
};

/// Sample rate in Hz. Always positive.
class SampleRate {
 public:
  constexpr SampleRate() = default;
  explicit SampleRate(std::int64_t hz) : hz_(hz) {
    if (hz < 1) fail(ErrorKind::InvalidConfig, "sample rate must be >= 1 Hz, got " + std::to_string(hz));
  }

  constexpr std::int64_t hz() const noexcept { return hz_; }

  friend constexpr auto operator<=>(const SampleRate&, const SampleRate&) = default;

 private:
  std::int64_t hz_ = 48000;
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct ContinuousSpec {
  std::string name;
  std::string description;
  double default_value = 0.0;
  bool operator==(const ContinuousSpec&) const = default;
};

struct CategoricalSpec {
  std::string name;
  std::string description;
  int n = 2;
  std::vector<std::string> labels;
  int default_index = 0;
  bool operator==(const CategoricalSpec&) const = default;
};

/// Free-text control. Offline processors only.
struct TextSpec {
  std::string name;
  std::string description;
  int max_chars = 1;
  std::string default_value;
  bool operator==(const TextSpec&) const = default;
};

using ParameterSpec = std::variant<ContinuousSpec, CategoricalSpec, TextSpec>;

inline const std::string& parameter_name(const ParameterSpec& spec) {
  return std::visit([](const auto& s) -> const std::string& { return s.name; }, spec);
}

struct ContinuousScalar {
  float value = 0.0f;
  bool operator==(const ContinuousScalar&) const = default;
};

/// One value per host frame of the buffer it accompanies.
struct ContinuousCurve {
  std::vector<float> values;
  bool operator==(const ContinuousCurve&) const = default;
};

struct CategoricalIndex {
  int index = 0;
  bool operator==(const CategoricalIndex&) const = default;
};

struct TextValue {
  std::string text;
  bool operator==(const TextValue&) const = default;
};

using ParameterValue = std::variant<ContinuousScalar, ContinuousCurve, CategoricalIndex, TextValue>;

namespace detail {

// Counts code points; returns -1 for malformed UTF-8.
inline long utf8_length(const std::string& s) {
  long count = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (lead < 0x80) extra = 0;
    else if ((lead >> 5) == 0x6) extra = 1;
    else if ((lead >> 4) == 0xE) extra = 2;
    else if ((lead >> 3) == 0x1E) extra = 3;
    else return -1;
    if (i + extra >= s.size() && extra > 0) return -1;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return -1;
    }
    i += extra + 1;
    ++count;
  }
  return count;
}

}  // namespace detail

inline bool is_valid_utf8(const std::string& s) { return detail::utf8_length(s) >= 0; }

/// Checks every spec against its type invariants. Throws ParameterDomain
/// naming the first violation.
inline void validate_parameter_specs(std::span<const ParameterSpec> specs, bool realtime) {
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    const auto& name = parameter_name(spec);
    if (name.empty()) fail(ErrorKind::ParameterDomain, "parameter name must be non-empty");
    if (!is_valid_utf8(name)) fail(ErrorKind::ParameterDomain, "parameter name is not valid UTF-8");
    if (!seen.insert(name).second) fail(ErrorKind::ParameterDomain, "duplicate parameter name '" + name + "'");

    if (const auto* c = std::get_if<ContinuousSpec>(&spec)) {
      if (!(c->default_value >= 0.0 && c->default_value <= 1.0))
        fail(ErrorKind::ParameterDomain, "'" + name + "': continuous default outside [0, 1]");
    } else if (const auto* k = std::get_if<CategoricalSpec>(&spec)) {
      if (k->n < 2) fail(ErrorKind::ParameterDomain, "'" + name + "': categorical needs n >= 2");
      if (static_cast<int>(k->labels.size()) != k->n)
        fail(ErrorKind::ParameterDomain, "'" + name + "': expected " + std::to_string(k->n) + " labels, got " +
                                             std::to_string(k->labels.size()));
      if (k->default_index < 0 || k->default_index >= k->n)
        fail(ErrorKind::ParameterDomain, "'" + name + "': categorical default out of range");
    } else {
      const auto& t = std::get<TextSpec>(spec);
      if (realtime) fail(ErrorKind::ParameterDomain, "'" + name + "': text parameters are offline-only");
      if (t.max_chars < 1) fail(ErrorKind::ParameterDomain, "'" + name + "': max_chars must be positive");
      const long len = detail::utf8_length(t.default_value);
      if (len < 0) fail(ErrorKind::ParameterDomain, "'" + name + "': default is not valid UTF-8");
      if (len > t.max_chars) fail(ErrorKind::ParameterDomain, "'" + name + "': default longer than max_chars");
    }
  }
}

inline std::vector<ParameterValue> default_parameter_values(std::span<const ParameterSpec> specs) {
  std::vector<ParameterValue> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    if (const auto* c = std::get_if<ContinuousSpec>(&spec)) {
      out.emplace_back(ContinuousScalar{static_cast<float>(c->default_value)});
    } else if (const auto* k = std::get_if<CategoricalSpec>(&spec)) {
      out.emplace_back(CategoricalIndex{k->default_index});
    } else {
      out.emplace_back(TextValue{std::get<TextSpec>(spec).default_value});
    }
  }
  return out;
}

/// Checks a value against the spec it is meant for. `frames` is the host
/// buffer length that curves must match (ignored when zero).
inline void check_parameter_value(const ParameterSpec& spec, const ParameterValue& value, std::size_t frames) {
  const auto& name = parameter_name(spec);
  if (std::holds_alternative<ContinuousSpec>(spec)) {
    if (const auto* s = std::get_if<ContinuousScalar>(&value)) {
      if (!(s->value >= 0.0f && s->value <= 1.0f))
        fail(ErrorKind::ParameterDomain, "'" + name + "': value outside [0, 1]");
    } else if (const auto* curve = std::get_if<ContinuousCurve>(&value)) {
      if (frames != 0 && curve->values.size() != frames) shape_mismatch("parameter curve length", frames, curve->values.size());
      for (float v : curve->values)
        if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorKind::ParameterDomain, "'" + name + "': curve value outside [0, 1]");
    } else {
      fail(ErrorKind::ParameterDomain, "'" + name + "': expects a continuous value");
    }
  } else if (const auto* k = std::get_if<CategoricalSpec>(&spec)) {
    const auto* idx = std::get_if<CategoricalIndex>(&value);
    if (!idx) fail(ErrorKind::ParameterDomain, "'" + name + "': expects a categorical index");
    if (idx->index < 0 || idx->index >= k->n) fail(ErrorKind::ParameterDomain, "'" + name + "': index out of range");
  } else {
    const auto& t = std::get<TextSpec>(spec);
    const auto* txt = std::get_if<TextValue>(&value);
    if (!txt) fail(ErrorKind::ParameterDomain, "'" + name + "': expects text");
    const long len = detail::utf8_length(txt->text);
    if (len < 0 || len > t.max_chars) fail(ErrorKind::ParameterDomain, "'" + name + "': text invalid or too long");
  }
}

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

struct ModelMetadata {
  std::string name;
  std::vector<std::string> authors;
  std::string description;
  std::vector<std::string> tags;
  std::string citation;
  std::map<std::string, std::string> technical_links;
  std::string version = "1.0.0";
  bool is_experimental = false;

  bool operator==(const ModelMetadata&) const = default;
};

inline void validate_metadata(const ModelMetadata& m) {
  if (m.name.empty()) fail(ErrorKind::InvalidConfig, "metadata name must be non-empty");
  auto check = [](const std::string& s, const char* field) {
    if (!is_valid_utf8(s)) fail(ErrorKind::InvalidConfig, std::string("metadata field '") + field + "' is not UTF-8");
  };
  check(m.name, "name");
  check(m.description, "description");
  check(m.citation, "citation");
  check(m.version, "version");
  for (const auto& a : m.authors) check(a, "authors");
  for (const auto& t : m.tags) check(t, "tags");
  for (const auto& [k, v] : m.technical_links) {
    check(k, "technical_links");
    check(v, "technical_links");
  }
}

}  // namespace adaptkit
