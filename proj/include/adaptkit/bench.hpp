// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "adaptkit/alloc_audit.hpp"
#include "adaptkit/core.hpp"
#include "adaptkit/rtwrap.hpp"

namespace adaptkit {

struct RtfResult {
  double rtf = 0.0;             // median over runs
  double mean_rtf = 0.0;
  double mean_buffer_s = 0.0;   // wall time per process_buffer call
  double worst_buffer_s = 0.0;
  std::vector<double> run_rtfs;
};

struct LatencyResult {
  std::int64_t reported = 0;
  std::int64_t measured = 0;
};

namespace detail {

inline void fill_bench_signal(AudioBlock& block, std::uint64_t start, double f) {
  for (int c = 0; c < block.channels(); ++c)
    for (std::size_t i = 0; i < block.frames(); ++i)
      block.at(c, i) = static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * static_cast<double>(start + i) / f));
}

}  // namespace detail

/// Real-time factor of `w` at host (f, n): audio seconds per wall second,
/// measured over at least `duration_s` of audio per run after one warm-up
/// pass. Reports the median of `runs` runs next to the mean.
inline RtfResult bench_rtf(RealtimeWrapper& w, SampleRate f, std::size_t n, double duration_s, int runs = 5) {
  if (runs < 1 || duration_s <= 0.0) fail(ErrorKind::InvalidConfig, "bench_rtf needs runs >= 1 and duration > 0");
  const int ch = w.processor().capabilities().in_channels;
  w.prepare(f, n, ch);
  const auto buffers = static_cast<std::uint64_t>(std::ceil(duration_s * static_cast<double>(f.hz()) / static_cast<double>(n)));
  AudioBlock in(ch, n);
  AudioBlock out(ch, n);
  const double audio_s = static_cast<double>(buffers * n) / static_cast<double>(f.hz());

  for (std::uint64_t b = 0; b < std::max<std::uint64_t>(1, buffers / 10); ++b) {
    detail::fill_bench_signal(in, b * n, static_cast<double>(f.hz()));
    w.process_buffer(in, {}, out);
  }

  using clock = std::chrono::steady_clock;
  RtfResult r;
  double total_buffer_s = 0.0;
  for (int run = 0; run < runs; ++run) {
    w.reset();
    double wall = 0.0;
    for (std::uint64_t b = 0; b < buffers; ++b) {
      detail::fill_bench_signal(in, b * n, static_cast<double>(f.hz()));
      const auto t0 = clock::now();
      w.process_buffer(in, {}, out);
      const double dt = std::chrono::duration<double>(clock::now() - t0).count();
      wall += dt;
      r.worst_buffer_s = std::max(r.worst_buffer_s, dt);
    }
    total_buffer_s += wall;
    r.run_rtfs.push_back(audio_s / std::max(wall, 1e-12));
  }
  auto sorted = r.run_rtfs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  r.rtf = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  for (double v : r.run_rtfs) r.mean_rtf += v / static_cast<double>(runs);
  r.mean_buffer_s = total_buffer_s / static_cast<double>(buffers * static_cast<std::uint64_t>(runs));
  return r;
}

/// Reported delay versus the lag of the cross-correlation peak between a
/// smooth pulse and the wrapper's response to it. The pulse width scales
/// with the rate ratio so it survives downsampling.
inline LatencyResult bench_latency(RealtimeWrapper& w, SampleRate f_daw, std::size_t n_daw) {
  const int ch = w.processor().capabilities().in_channels;
  const DelayReport report = w.prepare(f_daw, n_daw, ch);
  const StreamConfig& cfg = w.config();
  const double ratio = static_cast<double>(f_daw.hz()) / static_cast<double>(cfg.f_model.hz());
  const double sigma = 2.0 * std::max(1.0, ratio);
  const auto half = static_cast<std::size_t>(std::ceil(6.0 * sigma));
  std::vector<float> pulse(2 * half + 1);
  for (std::size_t k = 0; k < pulse.size(); ++k) {
    const double t = (static_cast<double>(k) - static_cast<double>(half)) / sigma;
    pulse[k] = static_cast<float>(std::exp(-0.5 * t * t));
  }

  const std::size_t t0 = 2 * half + 16;
  std::size_t total = t0 + report.total_daw_samples + 2 * half + 4 * n_daw + cfg.n_model;
  total = (total + n_daw - 1) / n_daw * n_daw;
  std::vector<float> response(total, 0.0f);
  AudioBlock in(ch, n_daw);
  AudioBlock out(ch, n_daw);
  for (std::size_t start = 0; start < total; start += n_daw) {
    for (int c = 0; c < ch; ++c) {
      for (std::size_t i = 0; i < n_daw; ++i) {
        const std::size_t t = start + i;
        const bool inside = t + half >= t0 && t <= t0 + half;
        in.at(c, i) = inside ? pulse[t + half - t0] : 0.0f;
      }
    }
    w.process_buffer(in, {}, out);
    std::copy_n(out.channel(0).data(), n_daw, response.begin() + static_cast<std::ptrdiff_t>(start));
  }

  std::int64_t best_lag = 0;
  double best = -INFINITY;
  for (std::size_t lag = 0; t0 + lag + half < total; ++lag) {
    double acc = 0.0;
    for (std::size_t k = 0; k < pulse.size(); ++k) acc += static_cast<double>(pulse[k]) * response[t0 - half + k + lag];
    if (acc > best) {
      best = acc;
      best_lag = static_cast<std::int64_t>(lag);
    }
  }
  return {static_cast<std::int64_t>(report.total_daw_samples), best_lag};
}

/// Counts heap allocations made strictly inside process_buffer over
/// `buffers` calls. Requires alloc_hooks.hpp in the executable.
inline std::uint64_t audit_allocations(RealtimeWrapper& w, SampleRate f, std::size_t n, std::uint64_t buffers,
                                       int host_channels = 0) {
  if (!alloc_audit::hooks_installed())
    fail(ErrorKind::InvalidConfig, "allocation hooks are not linked into this executable");
  const int ch = host_channels > 0 ? host_channels : w.processor().capabilities().in_channels;
  w.prepare(f, n, ch);
  AudioBlock in(ch, n);
  AudioBlock out(ch, n);
  const std::uint64_t before = alloc_audit::count();
  for (std::uint64_t b = 0; b < buffers; ++b) {
    detail::fill_bench_signal(in, b * n, static_cast<double>(f.hz()));
    alloc_audit::Scope armed;
    w.process_buffer(in, {}, out);
  }
  return alloc_audit::count() - before;
}

}  // namespace adaptkit
