// src/signal.cpp

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

#include "echopad/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "echopad/error.hpp"

namespace echopad::signal {

std::size_t seconds_to_samples(double seconds, int sample_rate_hz) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds))
    throw Error(ErrorKind::kInvalidSpec, "duration must be finite and non-negative");
  if (sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidSpec, "sample rate must be positive");
  return static_cast<std::size_t>(std::floor(seconds * sample_rate_hz + 0.5));
}

void validate(const PulseSpec& spec) {
  if (spec.sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidSpec, "sample rate must be positive");
  if (!(spec.carrier_hz > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "carrier frequency must be positive");
  const double nyquist = spec.sample_rate_hz / 2.0;
  if (spec.carrier_hz >= nyquist)
    throw Error(ErrorKind::kInvalidSpec,
                "carrier " + std::to_string(spec.carrier_hz) + " Hz is at or above Nyquist (" +
                    std::to_string(nyquist) + " Hz)");
  if (!(spec.duration_s >= 0.0) || !std::isfinite(spec.duration_s))
    throw Error(ErrorKind::kInvalidSpec, "pulse duration must be finite and non-negative");
  if (!(spec.amplitude > 0.0 && spec.amplitude <= 1.0))
    throw Error(ErrorKind::kInvalidSpec, "pulse amplitude must be in (0, 1]");
}

void validate(const SessionSchedule& s) {
  for (double v : {s.background_s, s.pulse_s, s.idle_s, s.receive_s})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::kInvalidSpec, "schedule durations must be finite and non-negative");
}

Waveform synth_pulse(const PulseSpec& spec) {
  validate(spec);
  Waveform out;
  out.sample_rate_hz = spec.sample_rate_hz;
  const std::size_t n = seconds_to_samples(spec.duration_s, spec.sample_rate_hz);
  out.samples.resize(n);
  const double step = 2.0 * std::numbers::pi * spec.carrier_hz / spec.sample_rate_hz;
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = spec.amplitude * std::sin(step * static_cast<double>(i));
  return out;
}

SessionBoundaries session_boundaries(const SessionSchedule& schedule, int sample_rate_hz) {
  validate(schedule);
  const double t1 = schedule.background_s;
  const double t2 = t1 + schedule.pulse_s;
  const double t3 = t2 + schedule.idle_s;
  const double t4 = t3 + schedule.receive_s;
  const std::size_t b1 = seconds_to_samples(t1, sample_rate_hz);
  const std::size_t b2 = seconds_to_samples(t2, sample_rate_hz);
  const std::size_t b3 = seconds_to_samples(t3, sample_rate_hz);
  const std::size_t b4 = seconds_to_samples(t4, sample_rate_hz);
  return {{0, b1}, {b1, b2}, {b2, b3}, {b3, b4}};
}

CaptureSegments segment_capture(const Waveform& capture, const SessionSchedule& schedule) {
  const auto bounds = session_boundaries(schedule, capture.sample_rate_hz);
  if (capture.size() != bounds.total())
    throw Error(ErrorKind::kSegmentation,
                "capture length mismatch: expected " + std::to_string(bounds.total()) +
                    " samples, got " + std::to_string(capture.size()));
  auto slice = [&](SampleRange r) {
    Waveform w;
    w.sample_rate_hz = capture.sample_rate_hz;
    w.samples.assign(capture.samples.begin() + static_cast<std::ptrdiff_t>(r.begin),
                     capture.samples.begin() + static_cast<std::ptrdiff_t>(r.end));
    return w;
  };
  return {slice(bounds.background), slice(bounds.receive)};
}

Waveform session_template(const PulseSpec& pulse, const SessionSchedule& schedule) {
  const Waveform tone = synth_pulse(pulse);
  const auto bounds = session_boundaries(schedule, pulse.sample_rate_hz);
  if (tone.size() > bounds.pulse.size())
    throw Error(ErrorKind::kInvalidSpec,
                "pulse (" + std::to_string(tone.size()) + " samples) does not fit its window (" +
                    std::to_string(bounds.pulse.size()) + " samples)");
  Waveform out;
  out.sample_rate_hz = pulse.sample_rate_hz;
  out.samples.assign(bounds.total(), 0.0);
  std::copy(tone.samples.begin(), tone.samples.end(),
            out.samples.begin() + static_cast<std::ptrdiff_t>(bounds.pulse.begin));
  return out;
}

}  // namespace echopad::signal
