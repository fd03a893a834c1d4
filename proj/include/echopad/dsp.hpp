// include/echopad/dsp.hpp

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

#include <cstddef>
#include <memory>
#include <vector>

#include "echopad/fft.hpp"
#include "echopad/waveform.hpp"

namespace echopad::dsp {

// Full-support cross-correlation output. values[i] is the correlation at lag
// first_lag + i, where lag is the delay of the clean signal relative to the
// pulse; first_lag = -(pulse_len - 1) and size = clean_len + pulse_len - 1.
struct CompressedSignal {
  std::vector<double> values;
  int sample_rate_hz = 44100;
  std::ptrdiff_t first_lag = 0;

  std::size_t size() const noexcept { return values.size(); }
  std::ptrdiff_t lag_at(std::size_t i) const noexcept {
    return first_lag + static_cast<std::ptrdiff_t>(i);
  }
  // Index of the maximum value (first on ties).
  std::size_t argmax() const noexcept;
};

enum class SubtractionMode {
  kTimeDomain,        // C[n] = R[n] - B[n]
  kSpectralMagnitude  // extension: |R(f)| - |B(f)| floored at 0, phase of R kept
};

// Sample-wise R - B. Cancels only components that repeat exactly between the
// background and receive windows.
Waveform subtract_background(const Waveform& echoes, const Waveform& background);

// Extension for the ablation study; not a literal sample-wise subtraction.
Waveform spectral_subtract(const Waveform& echoes, const Waveform& background);

Waveform remove_background(const Waveform& echoes, const Waveform& background,
                           SubtractionMode mode);

// Matched filter with the pulse spectrum cached for one clean-signal length.
// Immutable after construction; apply() may be called concurrently.
class MatchedFilter {
 public:
  MatchedFilter(const Waveform& pulse, std::size_t clean_len);

  std::size_t clean_len() const noexcept { return clean_len_; }
  std::size_t pulse_len() const noexcept { return pulse_.size(); }
  std::size_t output_len() const noexcept { return clean_len_ + pulse_.size() - 1; }

  CompressedSignal apply(const Waveform& clean) const;

 private:
  std::vector<double> pulse_;
  int sample_rate_hz_;
  std::size_t clean_len_;
  std::unique_ptr<fft::RealFft> fft_;
  std::vector<fft::Complex> pulse_spectrum_conj_;
};

// Short inputs are correlated directly, long ones through the FFT.
CompressedSignal matched_filter(const Waveform& clean, const Waveform& pulse);

double mean_power(const std::vector<double>& samples) noexcept;

// 10*log10(power(signal)/power(noise)). Zero-power noise returns +infinity.
double snr_db(const Waveform& signal_segment, const Waveform& noise_segment);

}  // namespace echopad::dsp
