// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "adaptkit/dsp/mel.hpp"
#include "adaptkit/dsp/stft.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace adaptkit;

namespace {

std::vector<float> round_trip(dsp::RealtimeStft& s, const std::vector<float>& x, const std::vector<std::size_t>& chunks) {
  std::vector<float> y, buf;
  std::size_t off = 0;
  for (std::size_t c : chunks) {
    s.push(std::span<const float>(x.data() + off, c));
    buf.resize(s.available());
    s.pull(buf);
    y.insert(y.end(), buf.begin(), buf.end());
    off += c;
  }
  return y;
}

}  // namespace

TEST_CASE("constant input survives the round trip") {
  dsp::RealtimeStft s(1024, 256);
  CHECK(s.delay() == 768);
  const std::vector<float> x(8192, 0.5f);
  const auto y = round_trip(s, x, {x.size()});
  REQUIRE(y.size() == x.size());
  for (std::size_t i = s.delay(); i < y.size(); ++i) CHECK(y[i] == Catch::Approx(0.5).margin(1e-4));
}

TEST_CASE("impulse comes back delayed by n_fft - hop") {
  for (std::size_t hop : {128u, 256u}) {
    dsp::RealtimeStft s(512, hop);
    std::vector<float> x(4096, 0.0f);
    x[1000] = 1.0f;
    const auto y = round_trip(s, x, {x.size()});
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == Catch::Approx(i == 1000 + 512 - hop ? 1.0 : 0.0).margin(1e-4));
  }
}

TEST_CASE("chunked round trip reconstructs noise") {
  const auto x = fixtures::noise(20000, 3);
  dsp::RealtimeStft a(256, 64, x.size()), b(256, 64);
  const auto whole = round_trip(a, x, {x.size()});
  const auto parts = round_trip(b, x, fixtures::random_chunks(x.size(), 300, 4));
  REQUIRE(parts.size() == whole.size());
  for (std::size_t i = 0; i < whole.size(); ++i) {
    CHECK(parts[i] == Catch::Approx(whole[i]).margin(1e-6));
    if (i >= 192) CHECK(parts[i] == Catch::Approx(x[i - 192]).margin(1e-4));
  }
}

TEST_CASE("analysis frames match a direct DFT") {
  const auto x = fixtures::noise(2048, 5);
  const auto ref = oracle::stft(std::vector<double>(x.begin(), x.end()), 256, 64);
  dsp::StftAnalyzer a(256, 64);
  std::size_t m = 0;
  double worst = 0.0;
  std::size_t off = 0;
  for (std::size_t c : fixtures::random_chunks(x.size(), 100, 6)) {
    a.push(std::span<const float>(x.data() + off, c), [&](std::span<std::complex<double>> bins) {
      for (std::size_t k = 0; k < bins.size(); ++k) worst = std::max(worst, std::abs(bins[k] - ref[m][k]));
      ++m;
    });
    off += c;
  }
  CHECK(m == ref.size());
  CHECK(worst <= 1e-4);
}

TEST_CASE("unsupported hops are rejected") {
  CHECK_THROWS_AS(dsp::RealtimeStft(512, 100), AdaptError);
  CHECK_THROWS_AS(dsp::RealtimeStft(512, 512), AdaptError);
  CHECK_THROWS_AS(dsp::StftAnalyzer(512, 0), AdaptError);
}

TEST_CASE("spectral helpers") {
  const std::size_t n = 256;
  dsp::StftAnalyzer a(n, n / 4);
  std::vector<float> x(n * 4);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(std::cos(2.0 * std::numbers::pi * 16.0 * static_cast<double>(i) / n));
  std::vector<std::complex<double>> last;
  a.push(x, [&](std::span<std::complex<double>> bins) { last.assign(bins.begin(), bins.end()); });
  dsp::normalize_spectrum(last, a.window());
  CHECK(std::abs(last[16]) == Catch::Approx(1.0).margin(1e-9));

  std::vector<float> mag(last.size()), ph(last.size());
  dsp::magnitude(last, mag);
  dsp::phase(last, ph);
  std::vector<std::complex<double>> back(last.size());
  dsp::from_polar(mag, ph, back);
  for (std::size_t k = 0; k < last.size(); ++k) CHECK(std::abs(back[k] - last[k]) <= 1e-6);

  const std::vector<float> from(5, 1.0f), to(5, 0.0f);
  std::vector<float> out(5);
  dsp::crossfade(from, to, out);
  CHECK(out.front() == 1.0f);
  CHECK(out[2] == 0.5f);
  CHECK(out.back() == 0.0f);
}

TEST_CASE("mel filterbank matches the textbook construction") {
  const auto fb = dsp::mel_filterbank(16000, 512, 40, 0, 8000);
  const auto ref = oracle::mel_bank(16000, 512, 40, 0, 8000);
  const std::size_t bins = 257;
  for (std::size_t m = 0; m < 40; ++m) {
    double row = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      CHECK(fb[m * bins + k] == Catch::Approx(ref[m][k]).margin(1e-12));
      row += fb[m * bins + k];
    }
    CHECK(row > 0.0);
  }
  for (std::size_t k = 1; k < bins - 1; ++k) {
    double col = 0.0;
    for (std::size_t m = 0; m < 40; ++m) col += fb[m * bins + k];
    CHECK(col > 0.0);
  }
  CHECK_THROWS_AS(dsp::mel_filterbank(16000, 512, 40, 0, 8001), AdaptError);
  CHECK_THROWS_AS(dsp::CachedMelSpec(16000, 512, 128, 40, 0, 9000), AdaptError);
}

TEST_CASE("mel frames of silence are zero") {
  dsp::CachedMelSpec mel(16000, 512, 128, 40, 0, 8000);
  const std::vector<float> x(4096, 0.0f);
  const auto frames = mel.push(x);
  CHECK(frames.size() == 32);
  for (const auto& f : frames)
    for (float v : f) CHECK(v == 0.0f);
}

TEST_CASE("streaming mel spectrogram matches the offline one") {
  const auto x = fixtures::noise(16000, 7, 0.1f);
  const auto spec = oracle::stft(std::vector<double>(x.begin(), x.end()), 512, 128);
  const auto bank = oracle::mel_bank(16000, 512, 40, 20, 7600);
  dsp::CachedMelSpec mel(16000, 512, 128, 40, 20, 7600);
  std::vector<std::vector<float>> frames;
  std::size_t off = 0;
  for (std::size_t c : fixtures::random_chunks(x.size(), 700, 8)) {
    for (auto& f : mel.push(std::span<const float>(x.data() + off, c))) frames.push_back(std::move(f));
    off += c;
  }
  REQUIRE(frames.size() == spec.size());
  double worst = 0.0;
  for (std::size_t t = 0; t < spec.size(); ++t)
    for (std::size_t m = 0; m < 40; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < spec[t].size(); ++k) acc += bank[m][k] * std::abs(spec[t][k]);
      worst = std::max(worst, std::abs(frames[t][m] - acc));
    }
  CHECK(worst <= 1e-5);
}
