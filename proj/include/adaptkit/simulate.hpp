// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "adaptkit/circular_queue.hpp"
#include "adaptkit/core.hpp"
#include "adaptkit/rtwrap.hpp"
#include "adaptkit/sandwich.hpp"

namespace adaptkit {

struct FixedSchedule {
  std::size_t size = 512;
};

/// Log-domain random walk: each size is held for a geometric number of
/// callbacks (mean `mean_dwell`), then multiplied by 2^u, u ~ U(-1, 1), and
/// clamped to [min, max].
struct RandomWalkSchedule {
  std::size_t min = 32;
  std::size_t max = 4096;
  std::uint64_t seed = 0;
  double mean_dwell = 8.0;
};

struct ScriptSchedule {
  std::vector<std::size_t> sizes;  // cycled when shorter than the run
};

using BufferSchedule = std::variant<FixedSchedule, RandomWalkSchedule, ScriptSchedule>;

/// Host change before callback `callback`. A new size turns the schedule
/// into Fixed(n_daw) from that point on.
struct ReconfigureEvent {
  std::uint64_t callback = 0;
  std::optional<SampleRate> f_daw;
  std::optional<std::size_t> n_daw;
};

struct SimScenario {
  SampleRate f_daw{48000};
  int channels = 1;
  BufferSchedule schedule = FixedSchedule{};
  std::uint64_t callbacks = 1000;
  std::vector<ReconfigureEvent> events;
  std::uint64_t seed = 0;  // test signal
};

/// One stretch of callbacks between two prepare() calls.
struct SimSegment {
  std::uint64_t first_callback = 0;
  std::uint64_t first_frame = 0;
  SampleRate f_daw;
  std::size_t n_daw = 0;
  std::size_t delay = 0;
  bool reconfigured_by_event = false;
};

struct SimResult {
  bool pass = true;
  bool verified = false;  // bit-exact check ran on at least one segment
  std::uint64_t callbacks = 0;
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t underflows = 0;
  std::uint64_t overflows = 0;
  bool conservation_ok = true;
  std::uint64_t segments = 0;
  std::uint64_t unverified_segments = 0;
  std::size_t max_input_fill = 0;
  std::size_t max_output_fill = 0;
  bool fill_within_capacity = true;
  std::optional<std::uint64_t> first_mismatch;  // host frame index from run start
  std::string message;
  std::vector<SimSegment> event_segments;  // segments opened by reconfigure events
};

namespace detail {

class SizeSource {
 public:
  explicit SizeSource(const BufferSchedule& s) : schedule_(s) {
    if (const auto* w = std::get_if<RandomWalkSchedule>(&schedule_)) {
      if (w->min < 1 || w->max < w->min) fail(ErrorKind::InvalidConfig, "random walk needs 1 <= min <= max");
      if (w->mean_dwell < 1.0) fail(ErrorKind::InvalidConfig, "random walk dwell must be >= 1");
      rng_.seed(w->seed);
      current_ = w->min + static_cast<std::size_t>(rng_() % (w->max - w->min + 1));
      dwell_ = draw_dwell(*w);
    } else if (const auto* f = std::get_if<FixedSchedule>(&schedule_)) {
      if (f->size < 1) fail(ErrorKind::InvalidConfig, "buffer size must be >= 1");
    } else {
      const auto& sc = std::get<ScriptSchedule>(schedule_);
      if (sc.sizes.empty()) fail(ErrorKind::InvalidConfig, "script schedule is empty");
      for (auto n : sc.sizes)
        if (n < 1) fail(ErrorKind::InvalidConfig, "buffer size must be >= 1");
    }
  }

  void force_fixed(std::size_t n) {
    if (n < 1) fail(ErrorKind::InvalidConfig, "buffer size must be >= 1");
    schedule_ = FixedSchedule{n};
  }

  std::size_t next() {
    if (const auto* f = std::get_if<FixedSchedule>(&schedule_)) return f->size;
    if (const auto* sc = std::get_if<ScriptSchedule>(&schedule_)) return sc->sizes[index_++ % sc->sizes.size()];
    const auto& w = std::get<RandomWalkSchedule>(schedule_);
    if (dwell_ == 0) {
      const double u = 2.0 * to_unit(rng_()) - 1.0;
      const double next = std::round(static_cast<double>(current_) * std::exp2(u));
      current_ = static_cast<std::size_t>(std::clamp(next, static_cast<double>(w.min), static_cast<double>(w.max)));
      dwell_ = draw_dwell(w);
    }
    --dwell_;
    return current_;
  }

 private:
  static double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

  std::uint64_t draw_dwell(const RandomWalkSchedule& w) {
    // geometric on {1, 2, ...} with mean `mean_dwell`
    const double p = 1.0 / w.mean_dwell;
    if (p >= 1.0) return 1;
    const double u = std::max(to_unit(rng_()), 1e-300);
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
  }

  BufferSchedule schedule_;
  std::mt19937_64 rng_;
  std::size_t current_ = 1;
  std::uint64_t dwell_ = 0;
  std::size_t index_ = 0;
};

}  // namespace detail

/// Drives `w` through a host scenario. Every change of host size or rate
/// re-prepares the wrapper, as a host would.
///
/// With `verify`, each segment whose model rate equals the host rate is
/// checked bit-exactly against the input passed through the channel
/// normalisation and delayed by the segment's reported delay. That holds for
/// processors that are a pure delay (identity, delay line). Segments with
/// resampling are counted in `unverified_segments`. Frame conservation and
/// queue bounds are always checked.
inline SimResult simulate(RealtimeWrapper& w, const SimScenario& sc, bool verify) {
  SimResult r;
  detail::SizeSource sizes(sc.schedule);
  std::mt19937_64 sig(sc.seed);
  std::uniform_real_distribution<float> noise(-1.0f, 1.0f);

  SampleRate f = sc.f_daw;
  std::size_t n = 0;
  std::size_t event_i = 0;
  auto events = sc.events;
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.callback < b.callback; });

  const auto& caps = w.processor().capabilities();
  bool segment_verifiable = false;
  CircularQueue expected;
  AudioBlock in, out, model_side, round_trip, want;
  std::uint64_t frame = 0;
  bool segment_open = false;

  auto close_segment = [&]() {
    if (!segment_open) return;
    const std::uint64_t in_total = w.stats().frames_in;
    const std::uint64_t out_total = w.stats().frames_out;
    const auto& cfg = w.config();
    const bool input_side = w.resampled_in_total() == w.stats().model_calls * cfg.n_model + w.input_fill();
    const bool output_side = cfg.d_buffering_daw + w.resampled_out_total() == out_total + w.output_fill();
    if (in_total != out_total || !input_side || !output_side) {
      r.conservation_ok = false;
      r.pass = false;
      if (r.message.empty()) r.message = "frame conservation violated in segment " + std::to_string(r.segments);
    }
    r.underflows += w.stats().underflows;
    r.max_input_fill = std::max(r.max_input_fill, w.stats().max_input_fill);
    r.max_output_fill = std::max(r.max_output_fill, w.stats().max_output_fill);
    if (w.stats().max_input_fill > cfg.input_queue_capacity || w.stats().max_output_fill > cfg.output_queue_capacity)
      r.fill_within_capacity = false;
  };

  for (std::uint64_t cb = 0; cb < sc.callbacks; ++cb) {
    bool by_event = false;
    while (event_i < events.size() && events[event_i].callback <= cb) {
      if (events[event_i].f_daw) f = *events[event_i].f_daw;
      if (events[event_i].n_daw) sizes.force_fixed(*events[event_i].n_daw);
      by_event = true;
      ++event_i;
    }
    const std::size_t next_n = sizes.next();
    if (!segment_open || next_n != n || by_event) {
      close_segment();
      n = next_n;
      const DelayReport rep = w.prepare(f, n, sc.channels);
      const auto& cfg = w.config();
      SimSegment seg{cb, frame, f, n, rep.total_daw_samples, by_event};
      if (by_event) r.event_segments.push_back(seg);
      ++r.segments;
      segment_open = true;
      segment_verifiable = verify && cfg.f_model == cfg.f_daw;
      if (verify && !segment_verifiable) ++r.unverified_segments;
      in.resize(sc.channels, n);
      out.resize(sc.channels, n);
      if (segment_verifiable) {
        r.verified = true;
        expected = CircularQueue(sc.channels, rep.total_daw_samples + n);
        expected.push_silence(rep.total_daw_samples);
        model_side.resize(caps.in_channels, n);
        round_trip.resize(sc.channels, n);
        want.resize(sc.channels, n);
      }
    }

    for (auto& s : in.samples()) s = noise(sig);
    try {
      w.process_buffer(in, {}, out);
    } catch (const AdaptError& e) {
      ++r.overflows;
      r.pass = false;
      if (r.message.empty()) r.message = std::string("callback ") + std::to_string(cb) + ": " + e.what();
      segment_open = false;
      break;
    }

    if (segment_verifiable && !r.first_mismatch) {
      remap_channels(in.samples().data(), sc.channels, model_side.samples().data(), caps.in_channels, n);
      remap_channels(model_side.samples().data(), caps.out_channels, round_trip.samples().data(), sc.channels, n);
      expected.push(round_trip);
      expected.pop(want, 0, n);
      for (std::size_t i = 0; i < n && !r.first_mismatch; ++i) {
        for (int c = 0; c < sc.channels; ++c) {
          if (out.at(c, i) != want.at(c, i)) {
            r.first_mismatch = frame + i;
            r.pass = false;
            r.message = "first mismatching sample at frame " + std::to_string(frame + i) + " (channel " +
                        std::to_string(c) + ")";
            break;
          }
        }
      }
    }
    frame += n;
    ++r.callbacks;
    r.frames_in += n;
    r.frames_out += out.frames();
  }
  close_segment();
  if (r.underflows > 0) {
    r.pass = false;
    if (r.message.empty()) r.message = std::to_string(r.underflows) + " output underflows";
  }
  if (!r.fill_within_capacity) {
    r.pass = false;
    if (r.message.empty()) r.message = "queue fill exceeded planned capacity";
  }
  return r;
}

}  // namespace adaptkit
