// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>

#include "adaptkit/builtins.hpp"
#include "adaptkit/dsp/conv.hpp"
#include "adaptkit/dsp/tcn.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace adaptkit;
using Signal = std::vector<std::vector<double>>;

namespace {

std::vector<double> widen(const std::vector<float>& v) { return {v.begin(), v.end()}; }

Signal to_signal(const AudioBlock& b) {
  Signal s(static_cast<std::size_t>(b.channels()));
  for (int c = 0; c < b.channels(); ++c) s[static_cast<std::size_t>(c)].assign(b.channel(c).begin(), b.channel(c).end());
  return s;
}

/// Runs `unit` over `x` in the given chunk sizes and concatenates the output.
template <typename Unit>
AudioBlock chunked(Unit& unit, const AudioBlock& x, int out_channels, const std::vector<std::size_t>& chunks) {
  AudioBlock y(out_channels, x.frames());
  std::size_t off = 0;
  for (std::size_t c : chunks) {
    AudioBlock in(x.channels(), c), out;
    for (int ch = 0; ch < x.channels(); ++ch)
      std::copy_n(x.channel(ch).begin() + static_cast<std::ptrdiff_t>(off), c, in.channel(ch).begin());
    unit.process(in, out);
    for (int ch = 0; ch < out_channels; ++ch)
      std::copy(out.channel(ch).begin(), out.channel(ch).end(), y.channel(ch).begin() + static_cast<std::ptrdiff_t>(off));
    off += c;
  }
  return y;
}

/// Whole-signal TCN in double precision.
Signal tcn_oracle(const dsp::TcnWeights& w, Signal x, const std::vector<double>& condition) {
  for (const auto& blk : w.blocks) {
    const auto conv = oracle::causal_conv(x, widen(blk.weights), widen(blk.bias), blk.kernel_size, blk.dilation);
    const std::size_t cols = condition.size() + 1;
    const auto in_ch = static_cast<int>(x.size());
    Signal y(static_cast<std::size_t>(blk.channels), std::vector<double>(x[0].size(), 0.0));
    for (int o = 0; o < blk.channels; ++o) {
      auto affine = [&](int row) {
        double v = blk.film[static_cast<std::size_t>(row) * cols + cols - 1];
        for (std::size_t c = 0; c < condition.size(); ++c) v += blk.film[static_cast<std::size_t>(row) * cols + c] * condition[c];
        return v;
      };
      const double gamma = affine(o), beta = affine(blk.channels + o);
      std::vector<int> sources;
      if (blk.channels >= in_ch) sources.push_back(o % in_ch);
      else
        for (int i = o; i < in_ch; i += blk.channels) sources.push_back(i);
      for (std::size_t t = 0; t < y[0].size(); ++t) {
        double r = 0.0;
        for (int s : sources) r += x[static_cast<std::size_t>(s)][t];
        r /= static_cast<double>(sources.size());
        y[static_cast<std::size_t>(o)][t] = r + std::tanh(gamma * conv[static_cast<std::size_t>(o)][t] + beta);
      }
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace

TEST_CASE("chunked convolution equals whole-signal convolution") {
  dsp::CachedConv1d conv(1, 1, 3, 1, {1.0f, 1.0f, 1.0f}, {});
  AudioBlock x(1, 40);
  for (std::size_t i = 0; i < 40; ++i) x.at(0, i) = static_cast<float>(i % 5) - 2.0f;
  const auto y = chunked(conv, x, 1, {1, 7, 3, 12, 1, 16});
  const auto ref = oracle::causal_conv(to_signal(x), {1, 1, 1}, {0}, 3, 1);
  for (std::size_t t = 0; t < 40; ++t) CHECK(y.at(0, t) == static_cast<float>(ref[0][t]));
}

TEST_CASE("impulse response is the time-reversed kernel") {
  dsp::CachedConv1d conv(1, 1, 4, 2, {1.0f, 2.0f, 3.0f, 4.0f}, {});
  AudioBlock x(1, 10), y;
  x.at(0, 0) = 1.0f;
  conv.process(x, y);
  const std::vector<float> expected{4, 0, 3, 0, 2, 0, 1, 0, 0, 0};
  for (std::size_t t = 0; t < 10; ++t) CHECK(y.at(0, t) == expected[t]);
}

TEST_CASE("multichannel dilated convolution matches the oracle under random chunking") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int d : {1, 3, 8}) {
    std::vector<float> w(3 * 2 * 5), b(3);
    for (auto& v : w) v = u(rng);
    for (auto& v : b) v = u(rng);
    dsp::CachedConv1d conv(2, 3, 5, d, w, b);
    const auto x = fixtures::noise_block(2, 600, static_cast<std::uint64_t>(d));
    const auto y = chunked(conv, x, 3, fixtures::random_chunks(600, 50, static_cast<std::uint64_t>(d) + 10));
    const auto ref = oracle::causal_conv(to_signal(x), widen(w), widen(b), 5, d);
    for (int o = 0; o < 3; ++o)
      for (std::size_t t = 0; t < 600; ++t) CHECK(y.at(o, t) == Catch::Approx(ref[static_cast<std::size_t>(o)][t]).margin(1e-5));
  }
}

TEST_CASE("receptive field of a dilated stack") {
  const auto w = demo_tcn_weights(1, 2, {1, 2, 4}, 3);
  CHECK(w.receptive_field() == 15);
  CHECK(dsp::TcnStack(w, 16).receptive_field() == 15);
}

TEST_CASE("TCN streaming matches the whole-signal oracle") {
  for (int channels : {1, 2}) {
    const auto w = demo_tcn_weights(channels, 3, {1, 2, 4, 8}, 3, 2, 11);
    dsp::TcnStack stack(w, 64);
    const std::vector<float> cond{0.3f, -0.6f};
    stack.set_condition(cond);
    const auto x = fixtures::noise_block(channels, 1000, 4);
    const auto y = chunked(stack, x, channels, fixtures::random_chunks(1000, 64, 5));
    const auto ref = tcn_oracle(w, to_signal(x), {0.3, -0.6});
    double worst = 0.0;
    for (int c = 0; c < channels; ++c)
      for (std::size_t t = 0; t < 1000; ++t)
        worst = std::max(worst, std::abs(y.at(c, t) - ref[static_cast<std::size_t>(c)][t]));
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("identity FiLM leaves the plain TCN output") {
  auto w = demo_tcn_weights(1, 2, {1, 2}, 3, 3, 2);
  for (auto& b : w.blocks) b.film = dsp::TcnWeights::identity_film(b.channels, w.condition_dim);
  dsp::TcnStack stack(w, 256);
  const auto x = fixtures::noise_block(1, 256, 8);
  AudioBlock a, b;
  stack.process(x, a);
  stack.reset();
  stack.set_condition(std::vector<float>{5.0f, -1.0f, 2.0f});
  stack.process(x, b);
  CHECK(a == b);
  const auto ref = tcn_oracle(w, to_signal(x), {0.0, 0.0, 0.0});
  for (std::size_t t = 0; t < 256; ++t) CHECK(a.at(0, t) == Catch::Approx(ref[0][t]).margin(1e-6));
}

TEST_CASE("TCN shape checks") {
  const auto w = demo_tcn_weights();
  dsp::TcnStack stack(w, 8);
  AudioBlock big(1, 9), out;
  CHECK_THROWS_AS(stack.process(big, out), AdaptError);
  CHECK_THROWS_AS(stack.set_condition(std::vector<float>{1.0f, 2.0f}), AdaptError);
  CHECK_THROWS_AS(dsp::CachedConv1d(1, 1, 3, 1, {1.0f}, {}), AdaptError);
}
