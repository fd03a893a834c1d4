// tests/support.hpp

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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "echopad/metrics.hpp"
#include "echopad/waveform.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "echopad") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(0, 1) == 1; }

  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = normal(0.0, sd);
    return v;
  }
  echopad::Waveform noise_wave(std::size_t n, int rate = 44100) { return {normals(n), rate}; }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// c[k] = sum_n x[n + k] * p[n] for k in [-(P-1), X-1]; index k + P - 1.
inline std::vector<double> direct_xcorr(const std::vector<double>& x, const std::vector<double>& p) {
  const long nx = static_cast<long>(x.size()), np = static_cast<long>(p.size());
  std::vector<double> out(static_cast<std::size_t>(nx + np - 1), 0.0);
  for (long k = -(np - 1); k < nx; ++k) {
    double acc = 0.0;
    for (long n = 0; n < np; ++n) {
      const long i = n + k;
      if (i >= 0 && i < nx) acc += x[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(n)];
    }
    out[static_cast<std::size_t>(k + np - 1)] = acc;
  }
  return out;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// Brute-force metrics: every rate is a linear count at every threshold.

struct BruteRates {
  double apcer = 0.0;  // worst attack type
  double bpcer = 0.0;
};

inline BruteRates brute_rates(const echopad::metrics::ScoreSet& s, double t) {
  BruteRates r;
  std::size_t rejected = 0;
  for (double v : s.bona) rejected += v < t;
  r.bpcer = static_cast<double>(rejected) * 100.0 / static_cast<double>(s.bona.size());
  for (const auto& [type, scores] : s.attacks) {
    std::size_t accepted = 0;
    for (double v : scores) accepted += v >= t;
    r.apcer = std::max(r.apcer, static_cast<double>(accepted) * 100.0 / static_cast<double>(scores.size()));
  }
  return r;
}

inline std::vector<double> brute_candidates(const echopad::metrics::ScoreSet& s) {
  std::set<double> u(s.bona.begin(), s.bona.end());
  for (const auto& [type, scores] : s.attacks) u.insert(scores.begin(), scores.end());
  std::vector<double> uniq(u.begin(), u.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    out.push_back(uniq[i]);
    if (i + 1 < uniq.size()) out.push_back(0.5 * (uniq[i] + uniq[i + 1]));
  }
  out.push_back(uniq.back() + std::max(1.0, std::abs(uniq.back())));
  return out;
}

struct BruteEer {
  double pct = 0.0;
  double threshold = 0.0;
};

inline BruteEer brute_d_eer(const echopad::metrics::ScoreSet& s) {
  const auto c = brute_candidates(s);
  std::vector<BruteRates> r;
  for (double t : c) r.push_back(brute_rates(s, t));
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double f = r[j].apcer - r[j].bpcer;
    if (f > 0.0) continue;
    if (j == 0 || f == 0.0) return {(r[j].apcer + r[j].bpcer) / 2.0, c[j]};
    const double fp = r[j - 1].apcer - r[j - 1].bpcer;
    const double alpha = fp / (fp - f);
    const double a = r[j - 1].apcer + alpha * (r[j].apcer - r[j - 1].apcer);
    const double b = r[j - 1].bpcer + alpha * (r[j].bpcer - r[j - 1].bpcer);
    return {(a + b) / 2.0, c[j - 1] + alpha * (c[j] - c[j - 1])};
  }
  return {};
}

inline double brute_bpcer_at(const echopad::metrics::ScoreSet& s, double target) {
  double best = 100.0;
  for (double t : brute_candidates(s)) {
    const auto r = brute_rates(s, t);
    if (r.apcer <= target) best = std::min(best, r.bpcer);
  }
  return best;
}

// Random score set: bona ~ N(shift, 1), 1..3 attack types ~ N(0, 1); a
// fraction of values is rounded to force ties.
inline echopad::metrics::ScoreSet random_score_set(Gen& g, std::size_t max_n) {
  echopad::metrics::ScoreSet s;
  const double shift = g.uniform(-1.0, 3.0);
  const bool ties = g.coin();
  auto draw = [&](double mean) {
    double v = g.normal(mean, 1.0);
    return ties ? std::round(v * 4.0) / 4.0 : v;
  };
  const std::size_t nb = g.index(1, max_n / 2);
  for (std::size_t i = 0; i < nb; ++i) s.bona.push_back(draw(shift));
  const std::size_t types = g.index(1, 3);
  static const char* names[] = {"display", "print_matte", "silicone"};
  for (std::size_t t = 0; t < types; ++t) {
    const std::size_t na = g.index(1, std::max<std::size_t>(1, (max_n - nb) / types));
    auto& v = s.attacks[names[t]];
    for (std::size_t i = 0; i < na; ++i) v.push_back(draw(0.0));
  }
  return s;
}

}  // namespace testing
