// src/dsp.cpp

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

#include "echopad/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "echopad/error.hpp"

namespace echopad::dsp {
namespace {

// Below this many multiply-adds the direct loop beats two FFTs.
constexpr std::size_t kDirectCorrelationLimit = 1u << 15;

void check_pair(const Waveform& a, const Waveform& b, const char* what) {
  if (a.sample_rate_hz != b.sample_rate_hz)
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + ": sample rate mismatch (" + std::to_string(a.sample_rate_hz) +
                    " vs " + std::to_string(b.sample_rate_hz) + ")");
  if (a.size() != b.size())
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
}

CompressedSignal correlate_direct(const Waveform& clean, const Waveform& pulse) {
  const std::size_t e = clean.size(), p = pulse.size();
  CompressedSignal out;
  out.sample_rate_hz = clean.sample_rate_hz;
  out.first_lag = -static_cast<std::ptrdiff_t>(p - 1);
  out.values.assign(e + p - 1, 0.0);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const std::ptrdiff_t lag = out.lag_at(i);
    const std::ptrdiff_t n_lo = std::max<std::ptrdiff_t>(0, -lag);
    const std::ptrdiff_t n_hi =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(p), static_cast<std::ptrdiff_t>(e) - lag);
    double acc = 0.0;
    for (std::ptrdiff_t n = n_lo; n < n_hi; ++n) acc += clean.samples[n + lag] * pulse.samples[n];
    out.values[i] = acc;
  }
  return out;
}

}  // namespace

std::size_t CompressedSignal::argmax() const noexcept {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Waveform subtract_background(const Waveform& echoes, const Waveform& background) {
  check_pair(echoes, background, "background subtraction");
  Waveform out;
  out.sample_rate_hz = echoes.sample_rate_hz;
  out.samples.resize(echoes.size());
  for (std::size_t i = 0; i < echoes.size(); ++i)
    out.samples[i] = echoes.samples[i] - background.samples[i];
  return out;
}

Waveform spectral_subtract(const Waveform& echoes, const Waveform& background) {
  check_pair(echoes, background, "spectral subtraction");
  Waveform out;
  out.sample_rate_hz = echoes.sample_rate_hz;
  if (echoes.empty()) return out;
  fft::RealFft fft(echoes.size());
  auto r = fft.forward(echoes.samples);
  const auto b = fft.forward(background.samples);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double mag_r = std::abs(r[k]);
    const double mag = std::max(0.0, mag_r - std::abs(b[k]));
    r[k] = mag_r > 0.0 ? r[k] * (mag / mag_r) : fft::Complex{};
  }
  out.samples = fft.inverse(r);
  const double scale = 1.0 / static_cast<double>(echoes.size());
  for (double& s : out.samples) s *= scale;
  return out;
}

Waveform remove_background(const Waveform& echoes, const Waveform& background,
                           SubtractionMode mode) {
  return mode == SubtractionMode::kTimeDomain ? subtract_background(echoes, background)
                                              : spectral_subtract(echoes, background);
}

MatchedFilter::MatchedFilter(const Waveform& pulse, std::size_t clean_len)
    : pulse_(pulse.samples), sample_rate_hz_(pulse.sample_rate_hz), clean_len_(clean_len) {
  if (pulse_.empty()) throw Error(ErrorKind::kInvalidArgument, "matched filter: empty pulse");
  if (clean_len_ == 0) throw Error(ErrorKind::kInvalidArgument, "matched filter: empty input");
  fft_ = std::make_unique<fft::RealFft>(fft::next_fast_size(output_len()));
  pulse_spectrum_conj_ = fft_->forward(pulse_);
  for (auto& c : pulse_spectrum_conj_) c = std::conj(c);
}

CompressedSignal MatchedFilter::apply(const Waveform& clean) const {
  if (clean.sample_rate_hz != sample_rate_hz_)
    throw Error(ErrorKind::kInvalidArgument, "matched filter: sample rate mismatch");
  if (clean.size() != clean_len_)
    throw Error(ErrorKind::kInvalidArgument,
                "matched filter: prepared for " + std::to_string(clean_len_) + " samples, got " +
                    std::to_string(clean.size()));
  auto spectrum = fft_->forward(clean.samples);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= pulse_spectrum_conj_[k];
  const auto circular = fft_->inverse(spectrum);

  const std::size_t n = fft_->size();
  const std::size_t p = pulse_.size();
  const double scale = 1.0 / static_cast<double>(n);
  CompressedSignal out;
  out.sample_rate_hz = sample_rate_hz_;
  out.first_lag = -static_cast<std::ptrdiff_t>(p - 1);
  out.values.resize(output_len());
  // Negative lags wrap to the end of the circular result.
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const std::ptrdiff_t lag = out.lag_at(i);
    const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag)
                                     : n - static_cast<std::size_t>(-lag);
    out.values[i] = circular[idx] * scale;
  }
  return out;
}

CompressedSignal matched_filter(const Waveform& clean, const Waveform& pulse) {
  if (pulse.empty()) throw Error(ErrorKind::kInvalidArgument, "matched filter: empty pulse");
  if (clean.sample_rate_hz != pulse.sample_rate_hz)
    throw Error(ErrorKind::kInvalidArgument, "matched filter: sample rate mismatch");
  if (clean.empty()) throw Error(ErrorKind::kInvalidArgument, "matched filter: empty input");
  if (clean.size() * pulse.size() <= kDirectCorrelationLimit) return correlate_direct(clean, pulse);
  return MatchedFilter(pulse, clean.size()).apply(clean);
}

double mean_power(const std::vector<double>& samples) noexcept {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc / static_cast<double>(samples.size());
}

double snr_db(const Waveform& signal_segment, const Waveform& noise_segment) {
  if (signal_segment.empty() || noise_segment.empty())
    throw Error(ErrorKind::kInvalidArgument, "snr: empty segment");
  const double ps = mean_power(signal_segment.samples);
  const double pn = mean_power(noise_segment.samples);
  if (pn == 0.0) return std::numeric_limits<double>::infinity();
  if (ps == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ps / pn);
}

}  // namespace echopad::dsp
