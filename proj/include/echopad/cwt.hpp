// include/echopad/cwt.hpp

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
#include <filesystem>
#include <span>
#include <vector>

#include "echopad/dsp.hpp"
#include "echopad/waveform.hpp"

namespace echopad::cwt {

// Generalized Morse wavelet parameters. beta follows from the time-bandwidth
// product P^2 = beta * gamma.
struct MorseParams {
  double gamma = 3.0;
  double time_bandwidth = 60.0;
  int num_filters = 10;
  double top_passband_hz = 20000.0;
  double min_center_hz = 2000.0;

  double beta() const noexcept { return time_bandwidth / gamma; }
};

// Radian frequency where omega^beta * exp(-omega^gamma) peaks.
double morse_peak_frequency(double beta, double gamma);

// Analytic Morse spectrum on the given radian-frequency grid, normalized to
// 1 at the peak; zero for omega <= 0.
std::vector<double> morse_spectrum(double beta, double gamma, std::span<const double> omega_grid);

// One frequency-domain filter, stored over its non-negligible bin support.
struct BandFilter {
  double center_hz = 0.0;
  std::size_t first_bin = 0;
  std::vector<double> gains;  // gains[i] applies to bin first_bin + i

  double gain_at_bin(std::size_t bin) const noexcept;
};

// Filters are analytic (zero on DC and negative bins) with peak gain 2, so a
// real tone of amplitude A at a center frequency yields magnitude A.
struct FilterBank {
  MorseParams params;
  int sample_rate_hz = 44100;
  std::size_t signal_len = 0;
  std::vector<BandFilter> filters;  // descending center frequency

  std::vector<double> center_freqs_hz() const;
  // Frequency response of filter k at an arbitrary frequency (no binning).
  double response(std::size_t k, double freq_hz) const;
};

void validate(const MorseParams& params, int sample_rate_hz);

// Centers are geometric from top_passband_hz down to min_center_hz.
std::vector<double> center_frequencies(const MorseParams& params);

FilterBank design_filterbank(const MorseParams& params, int sample_rate_hz, std::size_t signal_len);

struct Scalogram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> magnitudes;  // row-major rows x cols
  std::vector<double> center_freqs_hz;
  int sample_rate_hz = 44100;

  double at(std::size_t r, std::size_t c) const noexcept { return magnitudes[r * cols + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {magnitudes.data() + r * cols, cols};
  }
};

// Row k = |IFFT(FFT(x) . filter_k)|. Circular filtering: the signal length
// must equal the bank's design length.
Scalogram transform(std::span<const double> signal, const FilterBank& bank);
// Same, keeping only the first keep_cols columns (for zero-padded inputs).
Scalogram transform(std::span<const double> signal, const FilterBank& bank, std::size_t keep_cols);
Scalogram transform(const Waveform& signal, const FilterBank& bank);
Scalogram transform(const dsp::CompressedSignal& signal, const FilterBank& bank);

// Row-major grayscale image.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  double at(std::size_t r, std::size_t c) const noexcept { return pixels[r * width + c]; }
};

// Half-pixel-center bilinear resampling with edge clamping.
Image resize_bilinear(const Image& image, std::size_t height, std::size_t width);

constexpr double kDefaultDynamicRangeDb = 60.0;

// Peak-normalize, compress with log1p(K * x) where K = 10^(dynamic_range_db/20),
// min-max normalize to [0, 1], then resample bilinearly. Degenerate (constant
// or all-zero) inputs map to an all-zero image. Positive rescaling of the
// scalogram does not change the result.
Image to_image(const Scalogram& scalogram, std::size_t width, std::size_t height,
               double dynamic_range_db = kDefaultDynamicRangeDb);

// CSV: one line per row, comma-separated.
void write_csv(const std::filesystem::path& path, const Scalogram& scalogram);

// Binary, little-endian: rows (u64), cols (u64), sample rate (f64), then
// rows*cols float64 values in row-major order.
void write_binary(const std::filesystem::path& path, const Scalogram& scalogram);
Scalogram read_binary(const std::filesystem::path& path);

}  // namespace echopad::cwt
