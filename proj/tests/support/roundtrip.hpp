// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "adaptkit/resampler.hpp"
#include "support/oracles.hpp"

namespace roundtrip {

struct Quality {
  double snr_db = 0.0;
  double delay = 0.0;          // declared, in source samples
  double best_delay = 0.0;     // correlation peak found by the sinc oracle
};

inline std::vector<float> sine(double hz, double rate, std::size_t n) {
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate));
  return x;
}

/// Streams `x` a -> b -> a through two resamplers and scores the result
/// against the original shifted by the declared delay (sinc-interpolated).
template <typename R>
Quality measure(const std::vector<float>& x, adaptkit::SampleRate a, adaptkit::SampleRate b) {
  R fwd(1, a, b), back(1, b, a);
  std::vector<float> mid(fwd.max_output(x.size()));
  mid.resize(fwd.process(x.data(), x.size(), x.size(), mid.data(), mid.size()));
  std::vector<float> y(back.max_output(mid.size()));
  y.resize(back.process(mid.data(), mid.size(), mid.size(), y.data(), y.size()));

  const double ratio = static_cast<double>(a.hz()) / static_cast<double>(b.hz());
  Quality q;
  q.delay = fwd.delay() + back.delay() * ratio;

  std::vector<double> xd(x.begin(), x.end()), yd(y.begin(), y.end());
  const std::size_t from = 2048, to = std::min(xd.size(), yd.size()) - 2048;
  auto score = [&](double d) {
    std::vector<double> ref(to);
    for (std::size_t i = from; i < to; ++i) ref[i] = oracle::sinc_interp(xd, static_cast<double>(i) - d);
    return oracle::snr_db(ref, yd, from, to);
  };
  q.snr_db = score(q.delay);
  double best = -1e9;
  for (double d = q.delay - 1.0; d <= q.delay + 1.0; d += 0.0625) {
    const double s = score(d);
    if (s > best) {
      best = s;
      q.best_delay = d;
    }
  }
  return q;
}

}  // namespace roundtrip
