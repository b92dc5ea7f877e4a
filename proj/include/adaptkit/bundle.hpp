// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "adaptkit/builtins.hpp"
#include "adaptkit/bytes.hpp"
#include "adaptkit/core.hpp"
#include "adaptkit/dsp/tcn.hpp"
#include "adaptkit/processor.hpp"

namespace adaptkit {

inline constexpr char kBundleMagic[4] = {'N', 'A', 'B', '1'};
inline constexpr std::uint32_t kBundleFormatVersion = 1;
inline constexpr int kMetadataSchemaVersion = 1;

namespace payload_format {
inline constexpr const char* kIdentity = "builtin/identity";
inline constexpr const char* kGain = "builtin/gain";
inline constexpr const char* kClipper = "builtin/clipper";
inline constexpr const char* kDelayLine = "builtin/delayline";
inline constexpr const char* kTcn = "tcn/v1";
}  // namespace payload_format

inline bool is_registered_payload(const std::string& id) {
  using namespace payload_format;
  return id == kIdentity || id == kGain || id == kClipper || id == kDelayLine || id == kTcn;
}

struct BundleExample {
  std::string name;
  Bytes input_wav;
  Bytes output_wav;
  bool operator==(const BundleExample&) const = default;
};

struct BundlePayload {
  std::string format_id;
  Bytes bytes;
  bool operator==(const BundlePayload&) const = default;
};

struct Bundle {
  ModelMetadata metadata;
  std::vector<ParameterSpec> parameters;
  ProcessorCapabilities capabilities;
  std::vector<BundleExample> examples;
  BundlePayload payload;
  bool operator==(const Bundle&) const = default;
};

// ---------------------------------------------------------------------------
// Metadata JSON
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& why) { fail(ErrorKind::BundleFormat, "metadata schema: " + why); }

inline void expect_keys(const json& obj, const std::string& where, const std::set<std::string>& keys) {
  if (!obj.is_object()) schema_error(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!keys.contains(k)) schema_error("unknown key '" + k + "' in " + where);
  for (const auto& k : keys)
    if (!obj.contains(k)) schema_error("missing key '" + k + "' in " + where);
}

inline std::string get_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) schema_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> get_strings(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) schema_error(where + "." + key + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) schema_error(where + "." + key + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::int64_t get_int(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) schema_error(where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

inline double get_number(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) schema_error(where + "." + key + " must be a number");
  return v.get<double>();
}

inline json spec_to_json(const ParameterSpec& spec) {
  if (const auto* c = std::get_if<ContinuousSpec>(&spec))
    return {{"type", "continuous"}, {"name", c->name}, {"description", c->description}, {"default", c->default_value}};
  if (const auto* k = std::get_if<CategoricalSpec>(&spec))
    return {{"type", "categorical"}, {"name", k->name},   {"description", k->description},
            {"n", k->n},             {"labels", k->labels}, {"default", k->default_index}};
  const auto& t = std::get<TextSpec>(spec);
  return {{"type", "text"}, {"name", t.name}, {"description", t.description}, {"max_chars", t.max_chars},
          {"default", t.default_value}};
}

inline ParameterSpec spec_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) schema_error(where + " needs a string 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "continuous") {
    expect_keys(j, where, {"type", "name", "description", "default"});
    return ContinuousSpec{get_string(j, "name", where), get_string(j, "description", where), get_number(j, "default", where)};
  }
  if (type == "categorical") {
    expect_keys(j, where, {"type", "name", "description", "n", "labels", "default"});
    return CategoricalSpec{get_string(j, "name", where), get_string(j, "description", where),
                           static_cast<int>(get_int(j, "n", where)), get_strings(j, "labels", where),
                           static_cast<int>(get_int(j, "default", where))};
  }
  if (type == "text") {
    expect_keys(j, where, {"type", "name", "description", "max_chars", "default"});
    return TextSpec{get_string(j, "name", where), get_string(j, "description", where),
                    static_cast<int>(get_int(j, "max_chars", where)), get_string(j, "default", where)};
  }
  schema_error(where + " has unknown type '" + type + "'");
}

template <typename T, typename ToJson>
json native_to_json(const NativeSet<T>& s, ToJson&& to) {
  if (s.is_any()) return "any";
  json arr = json::array();
  for (const auto& v : s.values()) arr.push_back(to(v));
  return arr;
}

inline Aggregation aggregation_from(const std::string& s) {
  if (s == "mean") return Aggregation::Mean;
  if (s == "last") return Aggregation::Last;
  if (s == "nearest") return Aggregation::Nearest;
  schema_error("unknown aggregation '" + s + "'");
}

}  // namespace detail

/// Canonical JSON (sorted keys, no whitespace) for the functional and
/// cosmetic metadata of a bundle.
inline std::string metadata_to_json(const Bundle& b) {
  using detail::json;
  const auto& m = b.metadata;
  json links = json::object();
  for (const auto& [k, v] : m.technical_links) links[k] = v;
  json params = json::array();
  for (const auto& s : b.parameters) params.push_back(detail::spec_to_json(s));
  const auto& c = b.capabilities;
  json caps = {
      {"in_channels", c.in_channels},
      {"out_channels", c.out_channels},
      {"native_buffer_sizes", detail::native_to_json(c.native_buffer_sizes, [](std::size_t n) { return json(n); })},
      {"native_sample_rates", detail::native_to_json(c.native_sample_rates, [](SampleRate r) { return json(r.hz()); })},
      {"delay_samples", c.delay_samples},
      {"lookbehind_samples", c.lookbehind_samples},
      {"aggregation", to_string(c.aggregation)},
  };
  json root = {
      {"schema_version", kMetadataSchemaVersion},
      {"model",
       {{"name", m.name},
        {"authors", m.authors},
        {"description", m.description},
        {"tags", m.tags},
        {"citation", m.citation},
        {"technical_links", links},
        {"version", m.version},
        {"is_experimental", m.is_experimental}}},
      {"parameters", params},
      {"capabilities", caps},
  };
  return root.dump();
}

/// Parses and schema-checks metadata JSON into `b`'s metadata, parameters and
/// capabilities. Unknown or missing keys are rejected by name.
inline void metadata_from_json(const std::string& text, Bundle& b) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    detail::schema_error(std::string("invalid JSON: ") + e.what());
  }
  detail::expect_keys(root, "root", {"schema_version", "model", "parameters", "capabilities"});
  if (detail::get_int(root, "schema_version", "root") != kMetadataSchemaVersion)
    detail::schema_error("unsupported schema_version");

  const auto& mj = root.at("model");
  detail::expect_keys(mj, "model",
                      {"name", "authors", "description", "tags", "citation", "technical_links", "version",
                       "is_experimental"});
  ModelMetadata m;
  m.name = detail::get_string(mj, "name", "model");
  m.authors = detail::get_strings(mj, "authors", "model");
  m.description = detail::get_string(mj, "description", "model");
  m.tags = detail::get_strings(mj, "tags", "model");
  m.citation = detail::get_string(mj, "citation", "model");
  m.version = detail::get_string(mj, "version", "model");
  const auto& links = mj.at("technical_links");
  if (!links.is_object()) detail::schema_error("model.technical_links must be an object");
  for (const auto& [k, v] : links.items()) {
    if (!v.is_string()) detail::schema_error("model.technical_links values must be strings");
    m.technical_links[k] = v.get<std::string>();
  }
  if (!mj.at("is_experimental").is_boolean()) detail::schema_error("model.is_experimental must be a boolean");
  m.is_experimental = mj.at("is_experimental").get<bool>();

  const auto& pj = root.at("parameters");
  if (!pj.is_array()) detail::schema_error("parameters must be an array");
  std::vector<ParameterSpec> params;
  for (std::size_t i = 0; i < pj.size(); ++i) params.push_back(detail::spec_from_json(pj[i], "parameters[" + std::to_string(i) + "]"));

  const auto& cj = root.at("capabilities");
  detail::expect_keys(cj, "capabilities",
                      {"in_channels", "out_channels", "native_buffer_sizes", "native_sample_rates", "delay_samples",
                       "lookbehind_samples", "aggregation"});
  ProcessorCapabilities c;
  c.in_channels = static_cast<int>(detail::get_int(cj, "in_channels", "capabilities"));
  c.out_channels = static_cast<int>(detail::get_int(cj, "out_channels", "capabilities"));
  const auto nonneg = [](std::int64_t v, const char* what) {
    if (v < 0) detail::schema_error(std::string(what) + " must be >= 0");
    return static_cast<std::size_t>(v);
  };
  c.delay_samples = nonneg(detail::get_int(cj, "delay_samples", "capabilities"), "delay_samples");
  c.lookbehind_samples = nonneg(detail::get_int(cj, "lookbehind_samples", "capabilities"), "lookbehind_samples");
  if (!cj.at("aggregation").is_string()) detail::schema_error("capabilities.aggregation must be a string");
  c.aggregation = detail::aggregation_from(cj.at("aggregation").get<std::string>());

  const auto& sizes = cj.at("native_buffer_sizes");
  if (sizes.is_string() && sizes.get<std::string>() == "any") {
    c.native_buffer_sizes = BufferSizeSet::any();
  } else if (sizes.is_array()) {
    std::vector<std::size_t> v;
    for (const auto& e : sizes) {
      if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) detail::schema_error("native_buffer_sizes entries must be positive integers");
      v.push_back(e.get<std::size_t>());
    }
    c.native_buffer_sizes = BufferSizeSet::of(std::move(v));
  } else {
    detail::schema_error("native_buffer_sizes must be \"any\" or an array");
  }
  const auto& rates = cj.at("native_sample_rates");
  if (rates.is_string() && rates.get<std::string>() == "any") {
    c.native_sample_rates = SampleRateSet::any();
  } else if (rates.is_array()) {
    std::vector<SampleRate> v;
    for (const auto& e : rates) {
      if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) detail::schema_error("native_sample_rates entries must be positive integers");
      v.emplace_back(e.get<std::int64_t>());
    }
    c.native_sample_rates = SampleRateSet::of(std::move(v));
  } else {
    detail::schema_error("native_sample_rates must be \"any\" or an array");
  }

  try {
    validate_metadata(m);
    validate_parameter_specs(params, false);
    validate_capabilities(c);
  } catch (const AdaptError& e) {
    detail::schema_error(e.what());
  }
  b.metadata = std::move(m);
  b.parameters = std::move(params);
  b.capabilities = std::move(c);
}

// ---------------------------------------------------------------------------
// Container
// ---------------------------------------------------------------------------

/// Serialises a bundle. Output depends only on the bundle's contents.
inline Bytes write_bundle(const Bundle& b) {
  validate_metadata(b.metadata);
  validate_parameter_specs(b.parameters, false);
  validate_capabilities(b.capabilities);
  const std::string meta = metadata_to_json(b);
  ByteWriter w;
  w.raw(std::string(kBundleMagic, 4));
  w.u32(kBundleFormatVersion);
  w.u64(meta.size());
  w.raw(meta);
  w.u32(static_cast<std::uint32_t>(b.examples.size()));
  for (const auto& ex : b.examples) {
    if (ex.name.size() > 0xFFFF) fail(ErrorKind::InvalidConfig, "example name too long");
    w.u16(static_cast<std::uint16_t>(ex.name.size()));
    w.raw(ex.name);
    w.u64(ex.input_wav.size());
    w.raw(ex.input_wav);
    w.u64(ex.output_wav.size());
    w.raw(ex.output_wav);
  }
  if (b.payload.format_id.size() > 0xFFFF) fail(ErrorKind::InvalidConfig, "payload format id too long");
  w.u16(static_cast<std::uint16_t>(b.payload.format_id.size()));
  w.raw(b.payload.format_id);
  w.u64(b.payload.bytes.size());
  w.raw(b.payload.bytes);
  return w.take();
}

inline Bundle read_bundle(std::span<const std::uint8_t> data) {
  ByteReader r(data, ErrorKind::BundleFormat, "bundle");
  const std::string magic = r.str(4);
  if (magic != std::string(kBundleMagic, 4)) fail(ErrorKind::BundleFormat, "bundle at offset 0: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kBundleFormatVersion) r.error("unsupported format version " + std::to_string(version));
  Bundle b;
  const std::uint64_t meta_len = r.u64();
  const std::size_t meta_at = r.offset();
  const std::string meta = r.str(meta_len);
  try {
    metadata_from_json(meta, b);
  } catch (const AdaptError& e) {
    fail(ErrorKind::BundleFormat, "bundle at offset " + std::to_string(meta_at) + ": " + e.what());
  }
  const std::uint32_t n_examples = r.u32();
  for (std::uint32_t i = 0; i < n_examples; ++i) {
    BundleExample ex;
    ex.name = r.str(r.u16());
    const auto in = r.raw(r.u64());
    ex.input_wav.assign(in.begin(), in.end());
    const auto out = r.raw(r.u64());
    ex.output_wav.assign(out.begin(), out.end());
    b.examples.push_back(std::move(ex));
  }
  b.payload.format_id = r.str(r.u16());
  const auto payload = r.raw(r.u64());
  b.payload.bytes.assign(payload.begin(), payload.end());
  if (r.remaining() != 0) r.error("trailing bytes after payload");
  return b;
}

// ---------------------------------------------------------------------------
// Payloads
// ---------------------------------------------------------------------------

/// header {in_ch, out_ch, n_blocks, condition_dim} (u32), then per block
/// {kernel, dilation, channels} (u32), weights f32 (out, in, tap), bias f32,
/// FiLM matrix f32 (2 * channels) x (condition_dim + 1).
inline Bytes encode_tcn_payload(const dsp::TcnWeights& w) {
  w.validate();
  ByteWriter out;
  out.u32(static_cast<std::uint32_t>(w.in_channels));
  out.u32(static_cast<std::uint32_t>(w.out_channels));
  out.u32(static_cast<std::uint32_t>(w.blocks.size()));
  out.u32(static_cast<std::uint32_t>(w.condition_dim));
  for (const auto& b : w.blocks) {
    out.u32(static_cast<std::uint32_t>(b.kernel_size));
    out.u32(static_cast<std::uint32_t>(b.dilation));
    out.u32(static_cast<std::uint32_t>(b.channels));
    for (float v : b.weights) out.f32(v);
    for (float v : b.bias) out.f32(v);
    for (float v : b.film) out.f32(v);
  }
  return out.take();
}

inline dsp::TcnWeights decode_tcn_payload(std::span<const std::uint8_t> data) {
  ByteReader r(data, ErrorKind::BundleFormat, "tcn payload");
  constexpr std::uint32_t kLimit = 1u << 16;
  auto bounded = [&](std::uint32_t v, const char* what) {
    if (v > kLimit) r.error(std::string(what) + " out of range");
    return static_cast<int>(v);
  };
  dsp::TcnWeights w;
  w.in_channels = bounded(r.u32(), "in_channels");
  w.out_channels = bounded(r.u32(), "out_channels");
  const int n_blocks = bounded(r.u32(), "n_blocks");
  w.condition_dim = bounded(r.u32(), "condition_dim");
  int prev = w.in_channels;
  auto floats = [&](std::uint64_t n) {
    r.need(n * 4);
    std::vector<float> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = r.f32();
    return v;
  };
  for (int i = 0; i < n_blocks; ++i) {
    dsp::TcnBlockWeights b;
    b.kernel_size = bounded(r.u32(), "kernel_size");
    b.dilation = bounded(r.u32(), "dilation");
    b.channels = bounded(r.u32(), "channels");
    b.weights = floats(static_cast<std::uint64_t>(b.channels) * prev * b.kernel_size);
    b.bias = floats(static_cast<std::uint64_t>(b.channels));
    b.film = floats(2ull * b.channels * (static_cast<std::uint64_t>(w.condition_dim) + 1));
    prev = b.channels;
    w.blocks.push_back(std::move(b));
  }
  if (r.remaining() != 0) r.error("trailing bytes");
  try {
    w.validate();
  } catch (const AdaptError& e) {
    fail(ErrorKind::BundleFormat, std::string("tcn payload: ") + e.what());
  }
  return w;
}

/// Packs a builtin processor with its descriptors into a bundle.
inline Bundle bundle_builtin(const BuiltinSpec& spec, std::vector<BundleExample> examples = {}) {
  const auto proc = make_builtin(spec);
  Bundle b;
  b.metadata = proc->metadata();
  b.parameters.assign(proc->parameter_specs().begin(), proc->parameter_specs().end());
  b.capabilities = proc->capabilities();
  b.examples = std::move(examples);
  switch (spec.kind) {
    case BuiltinKind::Identity: b.payload.format_id = payload_format::kIdentity; break;
    case BuiltinKind::Gain: b.payload.format_id = payload_format::kGain; break;
    case BuiltinKind::Clipper: b.payload.format_id = payload_format::kClipper; break;
    case BuiltinKind::DelayLine: {
      b.payload.format_id = payload_format::kDelayLine;
      ByteWriter w;
      w.u64(spec.delay);
      b.payload.bytes = w.take();
      break;
    }
    case BuiltinKind::Tcn:
      b.payload.format_id = payload_format::kTcn;
      b.payload.bytes = encode_tcn_payload(spec.tcn);
      break;
  }
  return b;
}

/// Instantiates the processor a bundle carries. Opaque (unregistered)
/// payloads cannot be run and raise InvalidConfig.
inline std::unique_ptr<RealtimeProcessor> load_processor(const Bundle& b) {
  BuiltinSpec spec;
  spec.channels = b.capabilities.in_channels;
  spec.native_buffer_sizes = b.capabilities.native_buffer_sizes;
  spec.native_sample_rates = b.capabilities.native_sample_rates;
  const std::string& id = b.payload.format_id;
  if (id == payload_format::kIdentity) spec.kind = BuiltinKind::Identity;
  else if (id == payload_format::kGain) spec.kind = BuiltinKind::Gain;
  else if (id == payload_format::kClipper) spec.kind = BuiltinKind::Clipper;
  else if (id == payload_format::kDelayLine) {
    spec.kind = BuiltinKind::DelayLine;
    ByteReader r(b.payload.bytes, ErrorKind::BundleFormat, "delayline payload");
    spec.delay = static_cast<std::size_t>(r.u64());
    if (r.remaining() != 0) r.error("trailing bytes");
  } else if (id == payload_format::kTcn) {
    spec.kind = BuiltinKind::Tcn;
    spec.tcn = decode_tcn_payload(b.payload.bytes);
  } else {
    fail(ErrorKind::InvalidConfig, "payload format '" + id + "' is not runnable by this build");
  }
  return make_builtin(spec);
}

}  // namespace adaptkit
