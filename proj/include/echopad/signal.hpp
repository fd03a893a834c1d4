// include/echopad/signal.hpp

// Copyright 2026  echopad authors

// See ../../COPYING for clarification regarding multiple authors
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

#include <array>
#include <cstddef>

#include "echopad/waveform.hpp"

namespace echopad::signal {

struct PulseSpec {
  int sample_rate_hz = 44100;
  double carrier_hz = 21000.0;
  double duration_s = 2.0;
  double amplitude = 0.9;
};

// Timeline of one capture: listen to the background, transmit, stay idle,
// then record the echoes.
struct SessionSchedule {
  double background_s = 1.5;
  double pulse_s = 2.0;
  double idle_s = 0.5;
  double receive_s = 1.5;

  double total_s() const noexcept { return background_s + pulse_s + idle_s + receive_s; }
};

// Half-open sample range [begin, end).
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const SampleRange&) const = default;
};

struct SessionBoundaries {
  SampleRange background;
  SampleRange pulse;
  SampleRange idle;
  SampleRange receive;

  std::size_t total() const noexcept { return receive.end; }
};

struct CaptureSegments {
  Waveform background;
  Waveform echoes;
};

// round-half-up of seconds * rate.
std::size_t seconds_to_samples(double seconds, int sample_rate_hz);

void validate(const PulseSpec& spec);
void validate(const SessionSchedule& schedule);

// amplitude * sin(2*pi*carrier*n/rate) under a rectangular envelope.
Waveform synth_pulse(const PulseSpec& spec);

// Each boundary is the rounded cumulative time, so the four ranges are
// contiguous and exactly cover [0, total).
SessionBoundaries session_boundaries(const SessionSchedule& schedule, int sample_rate_hz);

CaptureSegments segment_capture(const Waveform& capture, const SessionSchedule& schedule);

// Transmit-side template: the pulse placed in its window, silence elsewhere.
// The pulse must fit its window.
Waveform session_template(const PulseSpec& pulse, const SessionSchedule& schedule);

}  // namespace echopad::signal
