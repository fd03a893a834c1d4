// src/fft.cpp

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

#include "echopad/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "echopad/error.hpp"

namespace echopad::fft {
namespace {

// FFTW's planner is not re-entrant; execution with the new-array interface
// is. All buffers handed to execute come from fftw_malloc so alignment
// matches the planning buffers.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};
template <typename T>
using AlignedPtr = std::unique_ptr<T[], FftwDeleter<T>>;

template <typename T>
AlignedPtr<T> aligned(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return AlignedPtr<T>(p);
}

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

enum class Kind { kReal, kComplex };

const PlanPair* plans_for(Kind kind, std::size_t n) {
  static std::map<std::pair<Kind, std::size_t>, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[{kind, n}];
  if (slot) return slot.get();
  auto pair = std::make_unique<PlanPair>();
  const int len = static_cast<int>(n);
  if (kind == Kind::kReal) {
    auto re = aligned<double>(n);
    auto co = aligned<fftw_complex>(n / 2 + 1);
    pair->forward = fftw_plan_dft_r2c_1d(len, re.get(), co.get(), FFTW_ESTIMATE);
    pair->inverse = fftw_plan_dft_c2r_1d(len, co.get(), re.get(), FFTW_ESTIMATE);
  } else {
    auto a = aligned<fftw_complex>(n);
    auto b = aligned<fftw_complex>(n);
    pair->forward = fftw_plan_dft_1d(len, a.get(), b.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    pair->inverse = fftw_plan_dft_1d(len, a.get(), b.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!pair->forward || !pair->inverse)
    throw Error(ErrorKind::kUnavailable, "FFTW failed to plan size " + std::to_string(n));
  slot = std::move(pair);
  return slot.get();
}

const PlanPair& as_plans(const void* p) { return *static_cast<const PlanPair*>(p); }

void check_size(std::size_t n) {
  if (n == 0 || n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
    throw Error(ErrorKind::kInvalidArgument, "FFT size out of range: " + std::to_string(n));
}

}  // namespace

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

RealFft::RealFft(std::size_t n) : n_(n) {
  check_size(n);
  plans_ = plans_for(Kind::kReal, n);
}

std::vector<Complex> RealFft::forward(std::span<const double> input) const {
  if (input.size() > n_)
    throw Error(ErrorKind::kInvalidArgument, "FFT input longer than transform size");
  auto in = aligned<double>(n_);
  std::copy(input.begin(), input.end(), in.get());
  std::fill(in.get() + input.size(), in.get() + n_, 0.0);
  auto out = aligned<fftw_complex>(bins());
  fftw_execute_dft_r2c(as_plans(plans_).forward, in.get(), out.get());
  std::vector<Complex> result(bins());
  std::memcpy(static_cast<void*>(result.data()), out.get(), sizeof(fftw_complex) * bins());
  return result;
}

std::vector<double> RealFft::inverse(std::span<const Complex> spectrum) const {
  if (spectrum.size() != bins())
    throw Error(ErrorKind::kInvalidArgument, "inverse FFT expects size/2+1 bins");
  auto in = aligned<fftw_complex>(bins());
  std::memcpy(in.get(), spectrum.data(), sizeof(fftw_complex) * bins());
  auto out = aligned<double>(n_);
  fftw_execute_dft_c2r(as_plans(plans_).inverse, in.get(), out.get());
  return std::vector<double>(out.get(), out.get() + n_);
}

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
  check_size(n);
  plans_ = plans_for(Kind::kComplex, n);
}

namespace {
void run_complex(fftw_plan plan, std::size_t n, std::span<const Complex> input,
                 std::vector<Complex>& out) {
  if (input.size() != n)
    throw Error(ErrorKind::kInvalidArgument, "complex FFT input size mismatch");
  auto in = aligned<fftw_complex>(n);
  std::memcpy(in.get(), input.data(), sizeof(fftw_complex) * n);
  auto buf = aligned<fftw_complex>(n);
  fftw_execute_dft(plan, in.get(), buf.get());
  out.resize(n);
  std::memcpy(static_cast<void*>(out.data()), buf.get(), sizeof(fftw_complex) * n);
}
}  // namespace

std::vector<Complex> ComplexFft::forward(std::span<const Complex> input) const {
  std::vector<Complex> out;
  run_complex(as_plans(plans_).forward, n_, input, out);
  return out;
}

std::vector<Complex> ComplexFft::backward(std::span<const Complex> input) const {
  std::vector<Complex> out;
  run_complex(as_plans(plans_).inverse, n_, input, out);
  return out;
}

void ComplexFft::backward(std::span<const Complex> input, std::vector<Complex>& out) const {
  run_complex(as_plans(plans_).inverse, n_, input, out);
}

}  // namespace echopad::fft
