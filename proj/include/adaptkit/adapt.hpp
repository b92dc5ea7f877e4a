// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>

#include "adaptkit/core.hpp"
#include "adaptkit/processor.hpp"
#include "adaptkit/resampler.hpp"

namespace adaptkit {

/// Model-rate frames produced by one host buffer: an exact count, or an
/// alternation between two consecutive counts when the rate ratio does not
/// divide the host buffer evenly.
struct BlockSpan {
  std::size_t lo = 0;
  std::size_t hi = 0;

  static BlockSpan exact(std::size_t n) { return {n, n}; }
  static BlockSpan varying(std::size_t lo, std::size_t hi) { return {lo, hi}; }

  bool is_exact() const noexcept { return lo == hi; }
  bool operator==(const BlockSpan&) const = default;
};

/// Smallest silence pre-seed that lets a FIFO fed `host_span` frames per
/// callback, drained in `n_model` blocks, return `host_span` frames on every
/// callback without running dry. The deficit host_span*j mod n_model peaks at
/// n_model - gcd(host_span, n_model).
constexpr std::size_t min_buffering_delay(std::size_t host_span, std::size_t n_model) {
  return n_model - std::gcd(host_span, n_model);
}

inline BlockSpan resampled_block_span(std::size_t n_daw, SampleRate f_daw, SampleRate f_model) {
  const auto num = static_cast<std::uint64_t>(n_daw) * static_cast<std::uint64_t>(f_model.hz());
  const auto den = static_cast<std::uint64_t>(f_daw.hz());
  const auto q = static_cast<std::size_t>(num / den);
  return num % den == 0 ? BlockSpan::exact(q) : BlockSpan::varying(q, q + 1);
}

/// Exact host rate when supported, else the smallest supported rate above
/// it, else the largest supported rate.
inline SampleRate select_sample_rate(const SampleRateSet& native, SampleRate f_daw) {
  if (native.is_any()) return f_daw;
  const auto& rates = native.values();
  if (rates.empty()) fail(ErrorKind::InvalidConfig, "empty native sample rate set");
  for (const auto& r : rates)
    if (r >= f_daw) return r;
  return rates.back();
}

inline std::size_t effective_buffering_delay(const BlockSpan& span, std::size_t n_model) {
  if (span.is_exact()) return min_buffering_delay(span.lo, n_model);
  return n_model - std::gcd(std::gcd(span.lo, span.hi), n_model);
}

inline std::size_t select_buffer_size(const BufferSizeSet& native, const BlockSpan& span) {
  if (native.is_any()) return std::max<std::size_t>(span.hi, 1);
  const auto& sizes = native.values();
  if (sizes.empty()) fail(ErrorKind::InvalidConfig, "empty native buffer size set");
  std::size_t best = sizes.front();
  std::size_t best_delay = effective_buffering_delay(span, best);
  for (std::size_t n : sizes) {
    const std::size_t d = effective_buffering_delay(span, n);
    if (d < best_delay) {
      best = n;
      best_delay = d;
    }
  }
  return best;
}

/// Resolved adaptation plan for one (processor, host) pairing.
struct StreamConfig {
  SampleRate f_daw;
  SampleRate f_model;
  std::size_t n_daw = 0;
  std::size_t n_model = 0;
  int c_daw = 1;
  ResamplerKind resampler = ResamplerKind::Hermite;
  BlockSpan block_span;

  std::size_t d_buffering = 0;      // model rate
  std::size_t d_buffering_daw = 0;  // silence pre-seed at host rate
  std::size_t d_model = 0;          // model rate
  std::size_t d_resample_in = 0;    // host rate (input of the in-resampler)
  std::size_t d_resample_out = 0;   // model rate (input of the out-resampler)
  std::size_t d_total_daw = 0;      // what the host should compensate

  std::size_t lookbehind = 0;
  std::size_t input_queue_capacity = 0;   // model rate
  std::size_t output_queue_capacity = 0;  // host rate

  bool operator==(const StreamConfig&) const = default;
};

namespace detail {

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace detail

/// Chooses model rate and block size, then derives every delay component and
/// queue capacity.
///
/// The buffering delay d is realised as ceil(d * f_daw / f_model) frames of
/// silence at the host-side output queue. Model-side FIFO reasoning shows
/// the queue then never underflows for any callback sequence: after j
/// callbacks at least j*n_daw*f_model/f_daw - d model frames have been
/// processed. Total latency is the pre-seed plus the in-resampler delay plus
/// model and out-resampler delays converted to host rate, rounded half up.
inline StreamConfig plan_stream(const ProcessorCapabilities& caps, SampleRate f_daw, std::size_t n_daw, int c_daw,
                                ResamplerKind kind = ResamplerKind::Hermite) {
  validate_capabilities(caps);
  if (n_daw < 1) fail(ErrorKind::InvalidConfig, "host buffer size must be >= 1");
  if (c_daw < 1 || c_daw > kMaxChannels)
    fail(ErrorKind::UnsupportedChannelCount, "host channel count must be 1..8, got " + std::to_string(c_daw));

  StreamConfig cfg;
  cfg.f_daw = f_daw;
  cfg.n_daw = n_daw;
  cfg.c_daw = c_daw;
  cfg.resampler = kind;
  cfg.f_model = select_sample_rate(caps.native_sample_rates, f_daw);
  cfg.block_span = resampled_block_span(n_daw, f_daw, cfg.f_model);
  cfg.n_model = select_buffer_size(caps.native_buffer_sizes, cfg.block_span);
  cfg.d_buffering = effective_buffering_delay(cfg.block_span, cfg.n_model);
  cfg.d_model = caps.delay_samples;
  cfg.lookbehind = caps.lookbehind_samples;

  const bool unity = cfg.f_daw == cfg.f_model;
  const auto fd = static_cast<std::uint64_t>(f_daw.hz());
  const auto fm = static_cast<std::uint64_t>(cfg.f_model.hz());
  cfg.d_resample_in = unity ? 0 : static_cast<std::size_t>(kernel_delay(kind));
  cfg.d_resample_out = unity ? 0 : static_cast<std::size_t>(kernel_delay(kind));
  cfg.d_buffering_daw = static_cast<std::size_t>(detail::ceil_div(cfg.d_buffering * fd, fm));

  // total = P + d_in + (d_out + d_model) * fd / fm, rounded half up
  const std::uint64_t num = (cfg.d_buffering_daw + cfg.d_resample_in) * fm + (cfg.d_resample_out + cfg.d_model) * fd;
  cfg.d_total_daw = static_cast<std::size_t>((2 * num + fm) / (2 * fm));

  cfg.input_queue_capacity = cfg.n_model + cfg.block_span.hi + 1;
  cfg.output_queue_capacity = cfg.d_buffering_daw + n_daw +
                              static_cast<std::size_t>(detail::ceil_div(cfg.n_model * fd, fm)) + 2;
  return cfg;
}

}  // namespace adaptkit
