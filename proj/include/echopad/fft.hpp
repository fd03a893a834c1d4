// include/echopad/fft.hpp

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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace echopad::fft {

using Complex = std::complex<double>;

// Smallest n' >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t next_fast_size(std::size_t n);

// Real-to-complex transform of a fixed size. Plans are created once per size
// and shared; execute calls are safe from any thread.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  // Input shorter than size() is zero-padded; longer input is an error.
  std::vector<Complex> forward(std::span<const double> input) const;
  // Unnormalized inverse: forward followed by inverse scales by size().
  std::vector<double> inverse(std::span<const Complex> spectrum) const;

 private:
  std::size_t n_;
  const void* plans_;
};

// Complex-to-complex transform of a fixed size (unnormalized both ways).
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  std::vector<Complex> forward(std::span<const Complex> input) const;
  std::vector<Complex> backward(std::span<const Complex> input) const;

  // Scratch-reusing variant for hot loops: `out` is resized to size().
  void backward(std::span<const Complex> input, std::vector<Complex>& out) const;

 private:
  std::size_t n_;
  const void* plans_;
};

}  // namespace echopad::fft
