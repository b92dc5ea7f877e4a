// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "adaptkit/adapt.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace adaptkit;
using fixtures::caps_of;

TEST_CASE("buffering delay matches FIFO simulation, small grid") {
  for (std::size_t h = 1; h <= 64; ++h)
    for (std::size_t b = 1; b <= 64; ++b)
      REQUIRE(static_cast<std::int64_t>(min_buffering_delay(h, b)) == oracle::fifo_min_prefill(h, b));
}

TEST_CASE("buffering delay worked examples") {
  CHECK(min_buffering_delay(512, 512) == 0);
  CHECK(oracle::fifo_min_prefill(3, 5) == 4);
  CHECK(min_buffering_delay(3, 5) == 4);
  CHECK(oracle::fifo_min_prefill(512, 2048) == 1536);
  CHECK(min_buffering_delay(512, 2048) == 1536);
  CHECK(oracle::fifo_min_prefill(2048, 512) == 0);
  CHECK(min_buffering_delay(2048, 512) == 0);
}

TEST_CASE("buffering delay is homogeneous in a common factor") {
  for (std::size_t h = 1; h <= 40; ++h)
    for (std::size_t b = 1; b <= 40; ++b)
      for (std::size_t k : {2u, 3u, 7u}) REQUIRE(min_buffering_delay(k * h, k * b) == k * min_buffering_delay(h, b));
}

TEST_CASE("resampled block span") {
  CHECK(resampled_block_span(512, SampleRate(48000), SampleRate(48000)) == BlockSpan::exact(512));
  CHECK(resampled_block_span(512, SampleRate(48000), SampleRate(24000)) == BlockSpan::exact(256));
  // 512 * 48000 / 44100 = 557.27...
  CHECK(512 * 48000 / 44100 == 557);
  CHECK(512 * 48000 % 44100 != 0);
  CHECK(resampled_block_span(512, SampleRate(44100), SampleRate(48000)) == BlockSpan::varying(557, 558));
}

TEST_CASE("sample rate selection order") {
  const SampleRate f(48000);
  CHECK(select_sample_rate(SampleRateSet::any(), f) == f);
  CHECK(select_sample_rate(SampleRateSet::of({SampleRate(44100), SampleRate(48000)}), f) == f);
  CHECK(select_sample_rate(SampleRateSet::of({SampleRate(22050), SampleRate(44100)}), f) == SampleRate(44100));
  CHECK(select_sample_rate(SampleRateSet::of({SampleRate(32000), SampleRate(88200), SampleRate(96000)}), f) ==
        SampleRate(88200));
}

TEST_CASE("buffer size selection") {
  CHECK(select_buffer_size(BufferSizeSet::any(), BlockSpan::exact(512)) == 512);
  // 256 -> 0, 512 -> 0, 2048 -> 1536; the tie goes to the smaller size
  CHECK(select_buffer_size(BufferSizeSet::of({256, 512, 2048}), BlockSpan::exact(512)) == 256);
  CHECK(select_buffer_size(BufferSizeSet::of({2048}), BlockSpan::varying(557, 558)) == 2048);
  CHECK(select_buffer_size(BufferSizeSet::of({1024, 4096}), BlockSpan::exact(3072)) == 1024);
}

TEST_CASE("effective delay for varying spans") {
  CHECK(effective_buffering_delay(BlockSpan::exact(512), 2048) == 1536);
  CHECK(effective_buffering_delay(BlockSpan::varying(557, 558), 2048) == 2047);
  for (std::size_t n : {1u, 7u, 512u, 2048u}) CHECK(effective_buffering_delay(BlockSpan::exact(n), n) == 0);
}

TEST_CASE("varying-span delay covers every exact arrival pattern") {
  // Arrivals per callback follow the resampler's cumulative ceil(k * up / down).
  struct Case {
    std::int64_t n_daw, f_daw, f_model, n_model;
  };
  for (const auto& c : {Case{512, 44100, 48000, 2048}, Case{512, 48000, 44100, 2048}, Case{441, 44100, 48000, 480},
                        Case{100, 48000, 16000, 64}, Case{127, 22050, 48000, 1000}}) {
    const std::int64_t g = std::gcd(c.f_daw, c.f_model);
    const std::int64_t up = c.f_model / g, down = c.f_daw / g;
    const std::int64_t period = down / std::gcd(down, c.n_daw * up);
    std::vector<std::int64_t> arrivals;
    std::int64_t prev = 0;
    for (std::int64_t k = 1; k <= period; ++k) {
      const std::int64_t total = (k * c.n_daw * up + down - 1) / down;
      arrivals.push_back(total - prev);
      prev = total;
    }
    const auto span = resampled_block_span(static_cast<std::size_t>(c.n_daw), SampleRate(c.f_daw), SampleRate(c.f_model));
    const auto planned = static_cast<std::int64_t>(effective_buffering_delay(span, static_cast<std::size_t>(c.n_model)));
    INFO("n_daw=" << c.n_daw << " f_daw=" << c.f_daw << " f_model=" << c.f_model);
    CHECK(planned >= oracle::fifo_min_prefill_pattern(arrivals, c.n_model));
  }
}

TEST_CASE("plan_stream worked examples") {
  SECTION("identity, any size and rate") {
    const auto c = plan_stream(caps_of(), SampleRate(48000), 512, 1);
    CHECK(c.f_model == SampleRate(48000));
    CHECK(c.n_model == 512);
    CHECK(c.d_total_daw == 0);
  }
  SECTION("2048-frame model at the host rate") {
    const auto c = plan_stream(caps_of({2048}, {48000}), SampleRate(48000), 512, 1);
    CHECK(c.d_buffering == 1536);
    CHECK(c.d_total_daw == 1536);
  }
  SECTION("2048-frame model at 48 kHz under a 44.1 kHz host") {
    const auto c = plan_stream(caps_of({2048}, {48000}), SampleRate(44100), 512, 1, ResamplerKind::Hermite);
    CHECK(c.d_buffering == 2047);
    // pre-seed ceil(2047 * 44100 / 48000) = 1881, input kernel 2, output kernel 2 * 44100 / 48000
    const double expected = 1881.0 + 2.0 + 2.0 * 44100.0 / 48000.0;
    CHECK(c.d_buffering_daw == 1881);
    CHECK(c.d_total_daw == static_cast<std::size_t>(std::floor(expected + 0.5)));
    CHECK(c.d_total_daw == 1885);
  }
  SECTION("model delay is carried to the host rate") {
    auto caps = caps_of({2048}, {48000});
    caps.delay_samples = 64;
    const auto c = plan_stream(caps, SampleRate(48000), 512, 2);
    CHECK(c.d_total_daw == 1536 + 64);
  }
}

TEST_CASE("plan_stream is pure") {
  const auto caps = caps_of({256, 1024}, {44100});
  CHECK(plan_stream(caps, SampleRate(48000), 300, 2) == plan_stream(caps, SampleRate(48000), 300, 2));
}

TEST_CASE("plan_stream rejects bad hosts") {
  CHECK_THROWS_AS(plan_stream(caps_of(), SampleRate(48000), 0, 1), AdaptError);
  CHECK_THROWS_AS(plan_stream(caps_of(), SampleRate(48000), 64, 9), AdaptError);
  ProcessorCapabilities empty = caps_of();
  empty.native_buffer_sizes = BufferSizeSet::of({});
  CHECK_THROWS_AS(plan_stream(empty, SampleRate(48000), 64, 1), AdaptError);
}
