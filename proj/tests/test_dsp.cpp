// tests/test_dsp.cpp

// Copyright 2026  echopad authors

// See ../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "echopad/dsp.hpp"
#include "echopad/error.hpp"
#include "echopad/signal.hpp"
#include "support.hpp"

using namespace echopad;
using namespace echopad::dsp;

namespace {

Waveform short_pulse(double seconds = 0.1) {
  signal::PulseSpec s;
  s.duration_s = seconds;
  return signal::synth_pulse(s);
}

// |DFT| of x at one frequency, by direct projection.
double tone_power(const std::vector<double>& x, double freq, int rate) {
  double re = 0.0, im = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double ph = 2.0 * std::numbers::pi * freq * static_cast<double>(n) / rate;
    re += x[n] * std::cos(ph);
    im += x[n] * std::sin(ph);
  }
  return (re * re + im * im) / static_cast<double>(x.size() * x.size());
}

}  // namespace

TEST_CASE("subtracting an identical background gives silence") {
  testing::Gen g(1);
  const auto r = g.noise_wave(1000);
  const auto c = subtract_background(r, r);
  CHECK(testing::max_abs(c.samples) == 0.0);
}

TEST_CASE("zero background is the identity") {
  testing::Gen g(2);
  const auto r = g.noise_wave(1000);
  CHECK(subtract_background(r, Waveform{std::vector<double>(1000, 0.0), 44100}).samples == r.samples);
}

TEST_CASE("subtraction rejects length and rate mismatches") {
  const Waveform a{std::vector<double>(10, 0.0), 44100};
  CHECK_THROWS_AS(subtract_background(a, Waveform{std::vector<double>(11, 0.0), 44100}), Error);
  CHECK_THROWS_AS(subtract_background(a, Waveform{std::vector<double>(10, 0.0), 48000}), Error);
}

TEST_CASE("stationary 50 Hz hum drops by at least 20 dB") {
  const int rate = 44100;
  const std::size_t n = 66150;
  // 50 Hz repeats every 882 samples; the two windows are 176400 samples apart.
  const std::size_t offset = 176400;
  const auto pulse = short_pulse(0.5);
  Waveform r{std::vector<double>(n, 0.0), rate}, b{std::vector<double>(n, 0.0), rate};
  for (std::size_t i = 0; i < n; ++i) {
    const double t_b = static_cast<double>(i) / rate;
    const double t_r = static_cast<double>(i + offset) / rate;
    b.samples[i] = 0.2 * std::sin(2 * std::numbers::pi * 50.0 * t_b + 0.3);
    r.samples[i] = 0.2 * std::sin(2 * std::numbers::pi * 50.0 * t_r + 0.3);
  }
  for (std::size_t i = 0; i < pulse.size(); ++i) r.samples[100 + i] += 0.1 * pulse.samples[i];
  const double before = tone_power(r.samples, 50.0, rate);
  const double after = tone_power(subtract_background(r, b).samples, 50.0, rate);
  CHECK(10.0 * std::log10(before / std::max(after, 1e-300)) >= 20.0);
}

TEST_CASE("spectral subtraction of an identical background is silent") {
  testing::Gen g(3);
  const auto r = g.noise_wave(512);
  CHECK(testing::max_abs(spectral_subtract(r, r).samples) <= 1e-12);
}

TEST_CASE("autocorrelation peaks at zero lag with the pulse energy") {
  const auto p = short_pulse(0.05);
  const auto c = matched_filter(p, p);
  CHECK(c.size() == 2 * p.size() - 1);
  CHECK(c.lag_at(c.argmax()) == 0);
  double energy = 0.0;
  for (double v : p.samples) energy += v * v;
  CHECK(c.values[c.argmax()] == doctest::Approx(energy).epsilon(1e-9));
}

TEST_CASE("scaled pulse delayed by 77 samples peaks at lag 77") {
  const auto p = short_pulse();
  Waveform clean{std::vector<double>(66150, 0.0), 44100};
  for (std::size_t i = 0; i < p.size(); ++i) clean.samples[77 + i] = 0.3 * p.samples[i];
  const auto c = matched_filter(clean, p);
  CHECK(c.size() == clean.size() + p.size() - 1);
  CHECK(c.first_lag == -static_cast<std::ptrdiff_t>(p.size() - 1));
  CHECK(c.lag_at(c.argmax()) == 77);
  const auto oracle = testing::direct_xcorr(clean.samples, p.samples);
  CHECK(oracle[c.argmax()] == doctest::Approx(c.values[c.argmax()]).epsilon(1e-9));
}

TEST_CASE("zero input compresses to zeros") {
  const auto p = short_pulse();
  const auto c = matched_filter(Waveform{std::vector<double>(20000, 0.0), 44100}, p);
  CHECK(testing::max_abs(c.values) == 0.0);
}

TEST_CASE("matched filter input errors") {
  CHECK_THROWS_AS(matched_filter(Waveform{{1.0}, 44100}, Waveform{{}, 44100}), Error);
  CHECK_THROWS_AS(matched_filter(Waveform{{1.0}, 44100}, Waveform{{1.0}, 8000}), Error);
  const MatchedFilter mf(short_pulse(0.01), 1000);
  CHECK_THROWS_AS(mf.apply(Waveform{std::vector<double>(999, 0.0), 44100}), Error);
}

TEST_CASE("FFT correlation agrees with direct correlation") {
  testing::Gen g(4);
  for (std::size_t len : {1u, 7u, 100u, 1000u, 4096u, 16384u}) {
    const std::size_t plen = std::max<std::size_t>(1, g.index(1, len));
    const auto x = g.noise_wave(len);
    const auto p = g.noise_wave(plen);
    const auto fast = MatchedFilter(p, len).apply(x);
    const auto oracle = testing::direct_xcorr(x.samples, p.samples);
    REQUIRE(fast.size() == oracle.size());
    double err = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) err = std::max(err, std::abs(fast.values[i] - oracle[i]));
    CHECK(err <= 1e-6 * testing::max_abs(oracle));
  }
}

TEST_CASE("property: matched filter is linear") {
  testing::Gen g(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = g.index(500, 5000);
    const auto p = g.noise_wave(g.index(10, 400));
    const auto x = g.noise_wave(n), y = g.noise_wave(n);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    Waveform mix{std::vector<double>(n), 44100};
    for (std::size_t i = 0; i < n; ++i) mix.samples[i] = a * x.samples[i] + b * y.samples[i];
    const MatchedFilter mf(p, n);
    const auto lhs = mf.apply(mix), fx = mf.apply(x), fy = mf.apply(y);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = a * fx.values[i] + b * fy.values[i];
      err = std::max(err, std::abs(lhs.values[i] - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
    CHECK(err <= 1e-9 * scale);
  }
}

TEST_CASE("property: noiseless delays are recovered exactly") {
  const auto p = short_pulse();
  const std::size_t e = 66150;
  const MatchedFilter mf(p, e);
  testing::Gen g(6);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t d = g.index(0, e - p.size());
    Waveform clean{std::vector<double>(e, 0.0), 44100};
    for (std::size_t i = 0; i < p.size(); ++i) clean.samples[d + i] = 0.5 * p.samples[i];
    const auto c = mf.apply(clean);
    CHECK(c.lag_at(c.argmax()) == static_cast<std::ptrdiff_t>(d));
  }
}

TEST_CASE("snr of equal and scaled segments") {
  testing::Gen g(7);
  const auto n = g.noise_wave(4000);
  CHECK(snr_db(n, n) == doctest::Approx(0.0));
  Waveform s = n;
  for (double& v : s.samples) v *= 10.0;
  CHECK(snr_db(s, n) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(std::isinf(snr_db(s, Waveform{std::vector<double>(10, 0.0), 44100})));
  CHECK_THROWS_AS(snr_db(Waveform{}, n), Error);
}

TEST_CASE("snr of a sine mix against white noise") {
  testing::Gen g(8);
  const std::size_t len = 10000;
  Waveform mix{std::vector<double>(len), 44100};
  const auto noise = g.noise_wave(len);
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    mix.samples[i] = 0.7 * std::sin(0.01 * static_cast<double>(i)) + 0.1 * noise.samples[i];
    ps += mix.samples[i] * mix.samples[i];
    pn += noise.samples[i] * noise.samples[i];
  }
  CHECK(snr_db(mix, noise) == doctest::Approx(10.0 * std::log10(ps / pn)).epsilon(1e-12));
}
