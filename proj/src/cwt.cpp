// src/cwt.cpp

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

#include "echopad/cwt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>

#include "echopad/error.hpp"
#include "echopad/fft.hpp"

namespace echopad::cwt {
namespace {

// Filter gains below this are treated as exact zeros.
constexpr double kSupportFloor = 1e-30;
constexpr double kAnalyticGain = 2.0;

double morse_value(double beta, double gamma, double omega_peak, double omega) {
  if (!(omega > 0.0)) return 0.0;
  // exp(beta*ln(w/wp) - (w^gamma - wp^gamma)) with wp^gamma = beta/gamma
  return std::exp(beta * std::log(omega / omega_peak) - (std::pow(omega, gamma) - beta / gamma));
}

struct Tap {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double w = 0.0;
};

// Half-pixel-center source coordinates for each output index.
std::vector<Tap> resample_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const std::size_t hi = std::min(lo + 1, in - 1);
    taps[i] = {lo, hi, src - static_cast<double>(lo)};
  }
  return taps;
}

template <typename Sample>
Image resample(std::size_t in_h, std::size_t in_w, std::size_t out_h, std::size_t out_w,
               Sample&& sample) {
  Image out;
  out.height = out_h;
  out.width = out_w;
  out.pixels.assign(out_h * out_w, 0.0);
  if (in_h == 0 || in_w == 0) return out;
  const auto rt = resample_taps(in_h, out_h);
  const auto ct = resample_taps(in_w, out_w);
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      const double top = sample(rt[r].lo, ct[c].lo) * (1.0 - ct[c].w) +
                         sample(rt[r].lo, ct[c].hi) * ct[c].w;
      const double bottom = sample(rt[r].hi, ct[c].lo) * (1.0 - ct[c].w) +
                            sample(rt[r].hi, ct[c].hi) * ct[c].w;
      out.pixels[r * out_w + c] = top * (1.0 - rt[r].w) + bottom * rt[r].w;
    }
  }
  return out;
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 8);
}
void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }
std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw Error(ErrorKind::kFormat, "truncated scalogram file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

}  // namespace

double morse_peak_frequency(double beta, double gamma) {
  if (!(beta > 0.0) || !(gamma > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "Morse parameters must be positive");
  return std::pow(beta / gamma, 1.0 / gamma);
}

std::vector<double> morse_spectrum(double beta, double gamma, std::span<const double> omega_grid) {
  const double wp = morse_peak_frequency(beta, gamma);
  std::vector<double> out(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i)
    out[i] = morse_value(beta, gamma, wp, omega_grid[i]);
  return out;
}

double BandFilter::gain_at_bin(std::size_t bin) const noexcept {
  if (bin < first_bin || bin >= first_bin + gains.size()) return 0.0;
  return gains[bin - first_bin];
}

std::vector<double> FilterBank::center_freqs_hz() const {
  std::vector<double> out;
  out.reserve(filters.size());
  for (const auto& f : filters) out.push_back(f.center_hz);
  return out;
}

double FilterBank::response(std::size_t k, double freq_hz) const {
  const double beta = params.beta();
  const double wp = morse_peak_frequency(beta, params.gamma);
  return kAnalyticGain * morse_value(beta, params.gamma, wp, wp * freq_hz / filters.at(k).center_hz);
}

void validate(const MorseParams& p, int sample_rate_hz) {
  if (!(p.gamma > 0.0)) throw Error(ErrorKind::kInvalidSpec, "Morse gamma must be positive");
  if (!(p.time_bandwidth > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "Morse time-bandwidth product must be positive");
  if (p.num_filters < 1) throw Error(ErrorKind::kInvalidSpec, "filter bank needs at least one filter");
  if (sample_rate_hz <= 0) throw Error(ErrorKind::kInvalidSpec, "sample rate must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  if (!(p.top_passband_hz < nyquist))
    throw Error(ErrorKind::kInvalidSpec, "top passband " + std::to_string(p.top_passband_hz) +
                                             " Hz must be below Nyquist (" +
                                             std::to_string(nyquist) + " Hz)");
  if (!(p.min_center_hz > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "minimum center frequency must be positive");
  if (p.num_filters > 1 && !(p.min_center_hz < p.top_passband_hz))
    throw Error(ErrorKind::kInvalidSpec, "minimum center must be below the top passband");
}

std::vector<double> center_frequencies(const MorseParams& p) {
  std::vector<double> centers(static_cast<std::size_t>(p.num_filters));
  if (p.num_filters == 1) {
    centers[0] = p.top_passband_hz;
    return centers;
  }
  const double span = p.min_center_hz / p.top_passband_hz;
  const double steps = static_cast<double>(p.num_filters - 1);
  for (int k = 0; k < p.num_filters; ++k)
    centers[static_cast<std::size_t>(k)] = p.top_passband_hz * std::pow(span, k / steps);
  centers.back() = p.min_center_hz;
  return centers;
}

FilterBank design_filterbank(const MorseParams& params, int sample_rate_hz, std::size_t signal_len) {
  validate(params, sample_rate_hz);
  if (signal_len < 2) throw Error(ErrorKind::kInvalidSpec, "filter bank length must be >= 2");
  FilterBank bank;
  bank.params = params;
  bank.sample_rate_hz = sample_rate_hz;
  bank.signal_len = signal_len;

  const double beta = params.beta();
  const double wp = morse_peak_frequency(beta, params.gamma);
  const std::size_t positive_bins = signal_len / 2;  // bins 1..N/2 inclusive
  const double bin_hz = static_cast<double>(sample_rate_hz) / static_cast<double>(signal_len);

  for (double center : center_frequencies(params)) {
    std::vector<double> dense(positive_bins + 1, 0.0);
    std::size_t lo = dense.size(), hi = 0;
    for (std::size_t j = 1; j <= positive_bins; ++j) {
      const double g =
          kAnalyticGain * morse_value(beta, params.gamma, wp, wp * (j * bin_hz) / center);
      if (g > kSupportFloor) {
        dense[j] = g;
        lo = std::min(lo, j);
        hi = j + 1;
      }
    }
    BandFilter filter;
    filter.center_hz = center;
    if (lo < hi) {
      filter.first_bin = lo;
      filter.gains.assign(dense.begin() + static_cast<std::ptrdiff_t>(lo),
                          dense.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    bank.filters.push_back(std::move(filter));
  }
  return bank;
}

Scalogram transform(std::span<const double> signal, const FilterBank& bank) {
  return transform(signal, bank, bank.signal_len);
}

Scalogram transform(std::span<const double> signal, const FilterBank& bank, std::size_t keep_cols) {
  if (signal.size() != bank.signal_len)
    throw Error(ErrorKind::kShapeMismatch,
                "scalogram: signal length " + std::to_string(signal.size()) +
                    " does not match filter bank length " + std::to_string(bank.signal_len));
  if (keep_cols > bank.signal_len)
    throw Error(ErrorKind::kInvalidArgument, "scalogram: cannot keep more columns than the signal length");
  const std::size_t n = bank.signal_len;
  Scalogram out;
  out.rows = bank.filters.size();
  out.cols = keep_cols;
  out.center_freqs_hz = bank.center_freqs_hz();
  out.sample_rate_hz = bank.sample_rate_hz;
  out.magnitudes.resize(out.rows * out.cols);

  const fft::RealFft rfft(n);
  const auto spectrum = rfft.forward(signal);
  const fft::ComplexFft cfft(n);
  std::vector<fft::Complex> filtered(n), analytic;
  const double scale = 1.0 / static_cast<double>(n);

  for (std::size_t k = 0; k < bank.filters.size(); ++k) {
    const auto& f = bank.filters[k];
    for (std::size_t i = 0; i < f.gains.size(); ++i) {
      const std::size_t bin = f.first_bin + i;
      filtered[bin] = spectrum[bin] * f.gains[i];
    }
    cfft.backward(filtered, analytic);
    // Clear only this filter's support for the next one.
    std::fill_n(filtered.begin() + static_cast<std::ptrdiff_t>(f.first_bin), f.gains.size(), fft::Complex{});
    double* row = out.magnitudes.data() + k * keep_cols;
    for (std::size_t t = 0; t < keep_cols; ++t) {
      const double re = analytic[t].real(), im = analytic[t].imag();
      row[t] = std::sqrt(re * re + im * im) * scale;
    }
  }
  return out;
}

Scalogram transform(const Waveform& signal, const FilterBank& bank) {
  if (signal.sample_rate_hz != bank.sample_rate_hz)
    throw Error(ErrorKind::kShapeMismatch, "scalogram: sample rate differs from filter bank");
  return transform(std::span<const double>(signal.samples), bank);
}

Scalogram transform(const dsp::CompressedSignal& signal, const FilterBank& bank) {
  if (signal.sample_rate_hz != bank.sample_rate_hz)
    throw Error(ErrorKind::kShapeMismatch, "scalogram: sample rate differs from filter bank");
  return transform(std::span<const double>(signal.values), bank);
}

Image resize_bilinear(const Image& image, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0)
    throw Error(ErrorKind::kInvalidArgument, "image size must be at least 1x1");
  return resample(image.height, image.width, height, width,
                  [&](std::size_t r, std::size_t c) { return image.at(r, c); });
}

Image to_image(const Scalogram& s, std::size_t width, std::size_t height, double dynamic_range_db) {
  if (height == 0 || width == 0)
    throw Error(ErrorKind::kInvalidArgument, "image size must be at least 1x1");
  Image zeros;
  zeros.height = height;
  zeros.width = width;
  zeros.pixels.assign(height * width, 0.0);
  if (s.magnitudes.empty()) return zeros;

  const auto [min_it, max_it] = std::minmax_element(s.magnitudes.begin(), s.magnitudes.end());
  const double peak = *max_it;
  if (!(peak > 0.0) || !std::isfinite(peak)) return zeros;

  const double gain = std::pow(10.0, dynamic_range_db / 20.0);
  auto compress = [&](double v) { return std::log1p(gain * (v / peak)); };
  // compress is monotone, so the extremes of the compressed image are the
  // compressed extremes of the input.
  const double lo = compress(*min_it);
  const double hi = compress(peak);
  if (!(hi > lo)) return zeros;
  const double inv_range = 1.0 / (hi - lo);

  return resample(s.rows, s.cols, height, width, [&](std::size_t r, std::size_t c) {
    return (compress(s.at(r, c)) - lo) * inv_range;
  });
}

void write_csv(const std::filesystem::path& path, const Scalogram& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t c = 0; c < s.cols; ++c) {
      if (c) out << ',';
      out << s.at(r, c);
    }
    out << '\n';
  }
}

void write_binary(const std::filesystem::path& path, const Scalogram& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  put_u64(out, s.rows);
  put_u64(out, s.cols);
  put_f64(out, static_cast<double>(s.sample_rate_hz));
  for (double v : s.magnitudes) put_f64(out, v);
}

Scalogram read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  Scalogram s;
  s.rows = get_u64(in);
  s.cols = get_u64(in);
  s.sample_rate_hz = static_cast<int>(std::bit_cast<double>(get_u64(in)));
  s.magnitudes.resize(s.rows * s.cols);
  for (double& v : s.magnitudes) v = std::bit_cast<double>(get_u64(in));
  return s;
}

}  // namespace echopad::cwt
