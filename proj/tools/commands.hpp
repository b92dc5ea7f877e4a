// SPDX-License-Identifier: Apache-2.0
//
// Subcommand bodies for the adaptkit tool. Each returns a process exit code
// and writes results to `out`, diagnostics to `err`.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adaptkit.hpp"

namespace adaptkit::cli {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kIoError = 3 };

/// Where the processor comes from, plus overrides applied to builtins.
struct ProcessorOptions {
  std::string builtin = "identity";
  std::string bundle;
  int channels = 1;
  std::vector<std::size_t> model_sizes;    // empty: any
  std::vector<std::int64_t> model_rates;   // empty: any
  std::string resampler = "hermite";
};

inline ResamplerKind parse_resampler(const std::string& s) {
  if (s == "hermite") return ResamplerKind::Hermite;
  if (s == "linear") return ResamplerKind::Linear;
  fail(ErrorKind::InvalidConfig, "unknown resampler '" + s + "' (hermite|linear)");
}

inline BuiltinSpec builtin_spec(const std::string& text, const ProcessorOptions& o) {
  BuiltinSpec spec = parse_builtin(text);
  spec.channels = o.channels;
  if (spec.kind == BuiltinKind::Tcn) spec.tcn = demo_tcn_weights(o.channels);
  if (!o.model_sizes.empty()) spec.native_buffer_sizes = BufferSizeSet::of(o.model_sizes);
  if (!o.model_rates.empty()) {
    std::vector<SampleRate> rates;
    for (auto r : o.model_rates) rates.emplace_back(r);
    spec.native_sample_rates = SampleRateSet::of(std::move(rates));
  }
  return spec;
}

inline std::unique_ptr<RealtimeProcessor> resolve_processor(const ProcessorOptions& o) {
  if (!o.bundle.empty()) return load_processor(read_bundle(read_file(o.bundle)));
  return make_builtin(builtin_spec(o.builtin, o));
}

inline std::string label(const ProcessorOptions& o) { return o.bundle.empty() ? o.builtin : o.bundle; }

/// Runs `body`, mapping the error taxonomy onto exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const AdaptError& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

inline void print_header(std::ostream& out, const std::string& cmd, std::uint64_t seed) {
  out << "# adaptkit " << cmd << " seed=" << seed << "\n";
}

inline void print_config(std::ostream& out, const StreamConfig& c) {
  out << "stream: f_daw=" << c.f_daw.hz() << " f_model=" << c.f_model.hz() << " n_daw=" << c.n_daw
      << " n_model=" << c.n_model << " channels=" << c.c_daw << " span=[" << c.block_span.lo << "," << c.block_span.hi
      << "]\n";
  out << "queues: input=" << c.input_queue_capacity << " output=" << c.output_queue_capacity
      << " lookbehind=" << c.lookbehind << "\n";
}

inline void print_delay(std::ostream& out, const DelayReport& d) {
  out << "delay: total_daw=" << d.total_daw_samples << " buffering=" << d.buffering
      << " buffering_daw=" << d.buffering_daw << " model=" << d.model << " resample_in=" << d.resample_in
      << " resample_out=" << d.resample_out << "\n";
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

struct RenderOptions {
  ProcessorOptions processor;
  std::string in_path;
  std::string out_path;
  std::int64_t rate = 0;  // 0: the input file's rate
  std::size_t buffer = 512;
  std::vector<std::string> params;  // name=value
  std::uint64_t seed = 0;
};

/// Converts name=value strings into one value per spec; missing names keep
/// their defaults. Categorical values accept an index or a label.
inline std::vector<ParameterValue> parse_params(std::span<const ParameterSpec> specs,
                                                const std::vector<std::string>& assignments) {
  std::vector<ParameterValue> values = default_parameter_values(specs);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) fail(ErrorKind::InvalidConfig, "parameter '" + a + "' is not name=value");
    const std::string name = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    std::size_t i = 0;
    while (i < specs.size() && parameter_name(specs[i]) != name) ++i;
    if (i == specs.size()) fail(ErrorKind::ParameterDomain, "unknown parameter '" + name + "'");
    try {
      if (std::holds_alternative<ContinuousSpec>(specs[i])) {
        values[i] = ContinuousScalar{std::stof(text)};
      } else if (const auto* k = std::get_if<CategoricalSpec>(&specs[i])) {
        const auto it = std::find(k->labels.begin(), k->labels.end(), text);
        values[i] = CategoricalIndex{it != k->labels.end() ? static_cast<int>(it - k->labels.begin()) : std::stoi(text)};
      } else {
        values[i] = TextValue{text};
      }
    } catch (const std::logic_error&) {
      fail(ErrorKind::ParameterDomain, "cannot parse value for '" + name + "'");
    }
    check_parameter_value(specs[i], values[i], 1);
  }
  return values;
}

inline int cmd_render(const RenderOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.buffer < 1) fail(ErrorKind::InvalidConfig, "--buffer must be >= 1");
    const WavAudio wav = read_wav(o.in_path);
    const SampleRate rate = o.rate > 0 ? SampleRate(o.rate) : wav.rate;
    RealtimeWrapper w(resolve_processor(o.processor), parse_resampler(o.processor.resampler));
    const auto params = parse_params(w.processor().parameter_specs(), o.params);
    const AudioBlock result = w.process_offline(wav.audio, params, rate, o.buffer);
    print_header(out, "render", o.seed);
    out << "processor: " << label(o.processor) << "\n";
    print_config(out, w.config());
    print_delay(out, w.delay_report());
    write_wav(o.out_path, result, rate);
    out << "wrote " << result.frames() << " frames x " << result.channels() << " channels to " << o.out_path << "\n";
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  ProcessorOptions processor;
  SimScenario scenario;
  bool verify = false;
  bool verbose = false;
};

/// "cb:rate:size" with either of rate or size allowed to be empty.
inline ReconfigureEvent parse_reconfigure(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3)
    fail(ErrorKind::InvalidConfig, "reconfigure event '" + text + "' is not callback:rate[:size]");
  ReconfigureEvent e;
  try {
    e.callback = std::stoull(parts[0]);
    if (!parts[1].empty()) e.f_daw = SampleRate(std::stoll(parts[1]));
    if (parts.size() == 3 && !parts[2].empty()) e.n_daw = std::stoull(parts[2]);
  } catch (const std::logic_error&) {
    fail(ErrorKind::InvalidConfig, "reconfigure event '" + text + "' is not callback:rate[:size]");
  }
  return e;
}

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RealtimeWrapper w(resolve_processor(o.processor), parse_resampler(o.processor.resampler));
    const SimResult r = simulate(w, o.scenario, o.verify);
    print_header(out, "simulate", o.scenario.seed);
    out << "processor: " << label(o.processor) << "\n";
    out << "callbacks=" << r.callbacks << " frames_in=" << r.frames_in << " frames_out=" << r.frames_out
        << " segments=" << r.segments << "\n";
    out << "underflows=" << r.underflows << " overflows=" << r.overflows
        << " conservation=" << (r.conservation_ok ? "exact" : "violated") << "\n";
    out << "max_input_fill=" << r.max_input_fill << " max_output_fill=" << r.max_output_fill
        << " within_capacity=" << (r.fill_within_capacity ? "yes" : "no") << "\n";
    for (const auto& s : r.event_segments)
      out << "reconfigure: callback=" << s.first_callback << " f_daw=" << s.f_daw.hz() << " n_daw=" << s.n_daw
          << " delay=" << s.delay << "\n";
    if (o.verify) {
      out << "verify: " << (r.verified ? "bit-exact" : "skipped") << " unverified_segments=" << r.unverified_segments
          << "\n";
    }
    if (!r.pass) {
      out << "FAIL: " << r.message << "\n";
      err << "simulation failed: " << r.message << "\n";
      return int{kVerifyFailed};
    }
    out << "PASS\n";
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// delay-table
// ---------------------------------------------------------------------------

struct DelayTableOptions {
  std::vector<std::size_t> model_sizes{2048};
  std::vector<std::size_t> host_sizes{512};
  std::vector<std::pair<std::int64_t, std::int64_t>> rates{{48000, 48000}};  // (host, model)
  std::string resampler = "hermite";
  std::string format = "text";
  std::uint64_t seed = 0;
};

inline int cmd_delay_table(const DelayTableOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const bool csv = o.format == "csv";
    if (!csv && o.format != "text") fail(ErrorKind::InvalidConfig, "--format must be text or csv");
    const ResamplerKind kind = parse_resampler(o.resampler);
    print_header(out, "delay-table", o.seed);
    if (csv) out << "host_rate,model_rate,model_size,host_size,total_daw,buffering,model_delay\n";
    for (const auto& [fh, fm] : o.rates) {
      for (const auto nm : o.model_sizes) {
        if (!csv) out << "host " << fh << " Hz, model " << fm << " Hz, model size " << nm << "\n";
        for (const auto nh : o.host_sizes) {
          ProcessorCapabilities caps;
          caps.native_buffer_sizes = BufferSizeSet::of({nm});
          caps.native_sample_rates = SampleRateSet::of({SampleRate(fm)});
          const StreamConfig c = plan_stream(caps, SampleRate(fh), nh, 1, kind);
          if (csv) {
            out << fh << "," << fm << "," << nm << "," << nh << "," << c.d_total_daw << "," << c.d_buffering << ","
                << c.d_model << "\n";
          } else {
            out << "  host size " << std::setw(6) << nh << " -> " << c.d_total_daw << "\n";
          }
        }
      }
    }
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  ProcessorOptions processor;
  bool rtf = false;
  bool latency = false;
  bool alloc = false;
  std::vector<std::int64_t> rates{48000};
  std::vector<std::size_t> buffers{512};
  double duration_s = 1.0;
  int runs = 5;
  std::uint64_t alloc_buffers = 10000;
  std::uint64_t seed = 0;
};

inline bool pure_delay(const ProcessorOptions& o) {
  if (!o.bundle.empty()) return false;
  const auto k = parse_builtin(o.builtin).kind;
  return k == BuiltinKind::Identity || k == BuiltinKind::Gain || k == BuiltinKind::DelayLine;
}

/// "all" expands to every builtin kind.
inline std::vector<std::string> expand_builtins(const std::string& b) {
  if (b == "all") return {"identity", "gain", "clipper", "delayline:64", "tcn"};
  return {b};
}

inline int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!o.rtf && !o.latency && !o.alloc) fail(ErrorKind::InvalidConfig, "choose --rtf, --latency or --alloc");
    print_header(out, "bench", o.seed);
    bool ok = true;
    const auto names = o.processor.bundle.empty() ? expand_builtins(o.processor.builtin) : std::vector<std::string>{""};
    for (const auto& name : names) {
      ProcessorOptions po = o.processor;
      if (!name.empty()) po.builtin = name;
      for (const auto rate : o.rates) {
        for (const auto n : o.buffers) {
          RealtimeWrapper w(resolve_processor(po), parse_resampler(po.resampler));
          out << label(po) << " rate=" << rate << " buffer=" << n;
          if (o.rtf) {
            const RtfResult r = bench_rtf(w, SampleRate(rate), n, o.duration_s, o.runs);
            out << " rtf_median=" << r.rtf << " rtf_mean=" << r.mean_rtf << " mean_buffer_us=" << r.mean_buffer_s * 1e6
                << " worst_buffer_us=" << r.worst_buffer_s * 1e6;
          }
          if (o.latency) {
            const LatencyResult l = bench_latency(w, SampleRate(rate), n);
            const bool within = std::llabs(l.reported - l.measured) <= 1;
            out << " reported=" << l.reported << " measured=" << l.measured << " within_1=" << (within ? "yes" : "no");
            // Only pure-delay processors have a response peak at the reported lag.
            if (!within && pure_delay(po)) ok = false;
          }
          if (o.alloc) {
            const std::uint64_t a = audit_allocations(w, SampleRate(rate), n, o.alloc_buffers);
            out << " allocations=" << a;
            if (a != 0) ok = false;
          }
          out << "\n";
        }
      }
    }
    return ok ? int{kOk} : int{kVerifyFailed};
  });
}

// ---------------------------------------------------------------------------
// inspect / export
// ---------------------------------------------------------------------------

struct InspectOptions {
  std::string bundle;
  std::uint64_t seed = 0;
};

inline int cmd_inspect(const InspectOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Bundle b = read_bundle(read_file(o.bundle));
    print_header(out, "inspect", o.seed);
    out << nlohmann::json::parse(metadata_to_json(b)).dump(2) << "\n";
    out << "examples: " << b.examples.size() << "\n";
    for (const auto& ex : b.examples)
      out << "  " << ex.name << " in=" << ex.input_wav.size() << " bytes out=" << ex.output_wav.size() << " bytes\n";
    out << "payload: " << b.payload.format_id << " " << b.payload.bytes.size() << " bytes"
        << (is_registered_payload(b.payload.format_id) ? "" : " (opaque)") << "\n";
    return int{kOk};
  });
}

struct ExportOptions {
  ProcessorOptions processor;
  std::string out_path;
  std::vector<std::string> example_inputs;  // WAV paths rendered through the processor
  std::size_t buffer = 512;
  std::uint64_t seed = 0;
};

inline int cmd_export(const ExportOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BuiltinSpec spec = builtin_spec(o.processor.builtin, o.processor);
    std::vector<BundleExample> examples;
    for (const auto& path : o.example_inputs) {
      const Bytes in_bytes = read_file(path);
      const WavAudio wav = decode_wav(in_bytes);
      RealtimeWrapper w(make_builtin(spec), parse_resampler(o.processor.resampler));
      const AudioBlock rendered = w.process_offline(wav.audio, {}, wav.rate, o.buffer);
      examples.push_back({std::filesystem::path(path).stem().string(), in_bytes, encode_wav(rendered, wav.rate)});
    }
    const Bytes bytes = write_bundle(bundle_builtin(spec, std::move(examples)));
    write_file(o.out_path, bytes);
    print_header(out, "export", o.seed);
    out << "wrote " << bytes.size() << " bytes to " << o.out_path << "\n";
    return int{kOk};
  });
}

}  // namespace adaptkit::cli
