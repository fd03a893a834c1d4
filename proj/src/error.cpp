// src/error.cpp

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

#include "echopad/error.hpp"

#include <algorithm>
#include <cmath>

#include "echopad/waveform.hpp"

namespace echopad {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidSpec: return "invalid-spec";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kSegmentation: return "segmentation";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kLoad: return "load";
    case ErrorKind::kUnavailable: return "unavailable";
  }
  return "unknown";
}

bool is_clipped(const Waveform& wave) noexcept {
  return std::any_of(wave.samples.begin(), wave.samples.end(),
                     [](double s) { return std::abs(s) > 1.0; });
}

bool all_finite(const Waveform& wave) noexcept {
  return std::all_of(wave.samples.begin(), wave.samples.end(),
                     [](double s) { return std::isfinite(s); });
}

}  // namespace echopad
