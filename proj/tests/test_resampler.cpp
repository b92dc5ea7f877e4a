// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <numbers>

#include "adaptkit/resampler.hpp"
#include "support/fixtures.hpp"
#include "support/roundtrip.hpp"

using namespace adaptkit;

namespace {

template <typename R>
std::vector<float> stream(R& r, const std::vector<float>& x, const std::vector<std::size_t>& chunks) {
  std::vector<float> y;
  std::vector<float> buf;
  std::size_t off = 0;
  for (std::size_t c : chunks) {
    buf.resize(r.max_output(c));
    const std::size_t n = r.process(x.data() + off, x.size(), c, buf.data(), buf.size());
    y.insert(y.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
    off += c;
  }
  return y;
}

template <typename R>
std::vector<float> stream(R& r, const std::vector<float>& x) {
  return stream(r, x, {x.size()});
}

const std::vector<std::pair<std::int64_t, std::int64_t>> kRatios{
    {44100, 48000}, {48000, 44100}, {48000, 16000}, {16000, 48000}, {22050, 96000}, {24000, 48000}};

}  // namespace

TEST_CASE("kernel delays") {
  CHECK(LinearResampler(1, SampleRate(44100), SampleRate(48000)).delay() == 1);
  CHECK(Hermite4pResampler(1, SampleRate(44100), SampleRate(48000)).delay() == 2);
  CHECK(Hermite4pResampler(1, SampleRate(48000), SampleRate(48000)).delay() == 0);
  CHECK(kernel_delay(ResamplerKind::Linear) == 1);
  CHECK(kernel_delay(ResamplerKind::Hermite) == 2);
}

TEST_CASE("linear 2x upsample emits the midpoint") {
  LinearResampler r(1, SampleRate(24000), SampleRate(48000));
  const auto y = stream(r, {0.0f, 1.0f, 1.0f});
  REQUIRE(y.size() == 6);
  // one-sample latency: y[2k] = x[k-1], y[2k+1] = (x[k-1] + x[k]) / 2
  CHECK(y[2] == 0.0f);
  CHECK(y[3] == 0.5f);
  CHECK(y[4] == 1.0f);
}

TEST_CASE("constant input stays constant after warm-up") {
  for (auto [a, b] : kRatios) {
    const std::vector<float> x(4000, 0.25f);
    Hermite4pResampler h(1, SampleRate(a), SampleRate(b));
    LinearResampler l(1, SampleRate(a), SampleRate(b));
    const auto yh = stream(h, x), yl = stream(l, x);
    const auto skip = static_cast<std::size_t>(std::ceil(4.0 * static_cast<double>(b) / static_cast<double>(a))) + 1;
    for (std::size_t i = skip; i < yh.size(); ++i) CHECK(yh[i] == Catch::Approx(0.25).margin(1e-6));
    for (std::size_t i = skip; i < yl.size(); ++i) CHECK(yl[i] == Catch::Approx(0.25).margin(1e-6));
  }
}

TEST_CASE("Hermite reproduces ramps and quadratics") {
  for (auto [a, b] : kRatios) {
    const double step = static_cast<double>(a) / static_cast<double>(b);
    std::vector<float> ramp(600), quad(600);
    for (std::size_t n = 0; n < ramp.size(); ++n) {
      ramp[n] = static_cast<float>(static_cast<double>(n) / 100.0);
      quad[n] = static_cast<float>(static_cast<double>(n) * static_cast<double>(n) / 1e5);
    }
    Hermite4pResampler r1(1, SampleRate(a), SampleRate(b)), r2(1, SampleRate(a), SampleRate(b));
    const auto y1 = stream(r1, ramp), y2 = stream(r2, quad);
    for (std::size_t k = 0; k < y1.size(); ++k) {
      const double t = static_cast<double>(k) * step - 2.0;  // read position at input rate
      if (t < 1.0) continue;
      // float arithmetic on values up to 6: scale the 1e-6 bound by magnitude
      CHECK(std::abs(y1[k] - t / 100.0) <= 1e-6 * std::max(1.0, t / 100.0));
      CHECK(std::abs(y2[k] - t * t / 1e5) <= 1e-6 * std::max(1.0, t * t / 1e5));
    }
  }
}

TEST_CASE("streaming output matches the aligned evaluation") {
  const auto x = fixtures::noise(3000, 4);
  for (auto [a, b] : kRatios) {
    Hermite4pResampler r(1, SampleRate(a), SampleRate(b));
    const auto y = stream(r, x);
    // the streaming path trails the zero-latency path by kDelay input samples
    std::vector<float> delayed(2, 0.0f);
    delayed.insert(delayed.end(), x.begin(), x.end());
    const auto ref = resample_aligned<HermiteKernel>(delayed, SampleRate(a), SampleRate(b), y.size());
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(y[k] == Catch::Approx(ref[k]).margin(1e-6));
  }
}

TEST_CASE("chunking does not change the output") {
  const auto x = fixtures::noise(5000, 11);
  for (auto [a, b] : kRatios) {
    Hermite4pResampler whole(1, SampleRate(a), SampleRate(b)), chunked(1, SampleRate(a), SampleRate(b));
    const auto y0 = stream(whole, x);
    const auto y1 = stream(chunked, x, fixtures::random_chunks(x.size(), 97, static_cast<std::uint64_t>(a + b)));
    CHECK(y0 == y1);
  }
}

TEST_CASE("cumulative output count tracks the exact ratio") {
  for (auto [a, b] : kRatios) {
    LinearResampler r(1, SampleRate(a), SampleRate(b));
    std::vector<float> buf(r.max_output(512));
    std::uint64_t in = 0;
    for (std::size_t c : fixtures::random_chunks(20000, 512, 77)) {
      const std::size_t predicted = r.output_count(c);
      std::vector<float> x(c, 0.0f);
      CHECK(r.process(x.data(), c, c, buf.data(), buf.size()) == predicted);
      in += c;
      const auto exact_num = static_cast<std::uint64_t>(in) * static_cast<std::uint64_t>(b);
      const std::uint64_t lo = exact_num / static_cast<std::uint64_t>(a);
      const std::uint64_t hi = (exact_num + static_cast<std::uint64_t>(a) - 1) / static_cast<std::uint64_t>(a);
      CHECK(r.total_outputs() >= lo);
      CHECK(r.total_outputs() <= hi);
    }
  }
}

TEST_CASE("equal rates bypass the kernel") {
  const auto x = fixtures::noise(1000, 2);
  Hermite4pResampler r(1, SampleRate(48000), SampleRate(48000));
  CHECK(r.bypassed());
  CHECK(stream(r, x, fixtures::random_chunks(x.size(), 50, 3)) == x);
}

TEST_CASE("reset restores the initial state") {
  const auto x = fixtures::noise(700, 5);
  Hermite4pResampler r(2, SampleRate(44100), SampleRate(48000));
  AudioBlock in(2, 700), out1, out2;
  std::copy(x.begin(), x.end(), in.channel(0).begin());
  std::copy(x.rbegin(), x.rend(), in.channel(1).begin());
  r.process(in, out1);
  r.reset();
  r.process(in, out2);
  CHECK(out1 == out2);
}

TEST_CASE("linear downsampling aliases a tone above the new Nyquist") {
  // 20 kHz at 48 kHz -> 16 kHz: no anti-alias filter, so energy folds to 4 kHz
  const auto x = roundtrip::sine(20000.0, 48000.0, 48000);
  LinearResampler r(1, SampleRate(48000), SampleRate(16000));
  const auto y = stream(r, x);
  auto power_at = [&](double hz) {
    std::complex<double> acc{};
    for (std::size_t n = 0; n < y.size(); ++n)
      acc += static_cast<double>(y[n]) * std::polar(1.0, -2.0 * std::numbers::pi * hz * static_cast<double>(n) / 16000.0);
    return std::abs(acc) / static_cast<double>(y.size());
  };
  const double alias = power_at(4000.0);
  CHECK(alias > 0.01);
  CHECK(alias > 10.0 * power_at(3000.0));
}

TEST_CASE("round-trip quality of a 441 Hz sine") {
  const auto x = roundtrip::sine(441.0, 44100.0, 16384);
  const auto h = roundtrip::measure<Hermite4pResampler>(x, SampleRate(44100), SampleRate(48000));
  const auto l = roundtrip::measure<LinearResampler>(x, SampleRate(44100), SampleRate(48000));
  CHECK(h.snr_db >= 40.0);
  CHECK(l.snr_db >= 25.0);
  // the sinc oracle agrees with the declared delay
  CHECK(std::abs(h.best_delay - h.delay) <= 0.0625);
}

TEST_CASE("Hermite costs at most three times linear") {
  const auto x = fixtures::noise(1 << 18, 8);
  auto time_of = [&](auto make) {
    double best = 1e30;
    for (int rep = 0; rep < 5; ++rep) {
      auto r = make();
      const auto t0 = std::chrono::steady_clock::now();
      const auto y = stream(r, x);
      const auto t1 = std::chrono::steady_clock::now();
      CHECK(!y.empty());
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double lin = time_of([] { return LinearResampler(1, SampleRate(44100), SampleRate(48000)); });
  const double her = time_of([] { return Hermite4pResampler(1, SampleRate(44100), SampleRate(48000)); });
  CHECK(her <= 3.0 * lin);
}
