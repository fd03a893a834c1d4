// src/wav_io.cpp

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

#include "echopad/wav_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "echopad/error.hpp"

namespace echopad::wav {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorKind::kFormat, path.string() + ": " + what);
}

}  // namespace

Waveform read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0)
    fail(path, "not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* payload = nullptr;
  std::size_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char* chunk = data + pos;
    std::uint32_t size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t avail = std::min<std::size_t>(size, n - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) fail(path, "truncated fmt chunk");
      format = read_u16(data + body);
      channels = read_u16(data + body + 2);
      rate = read_u32(data + body + 4);
      bits = read_u16(data + body + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) fail(path, "truncated extensible fmt chunk");
        format = read_u16(data + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = data + body;
      payload_size = avail;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail(path, "missing fmt chunk");
  if (payload == nullptr) fail(path, "missing data chunk");
  if (channels != 1) fail(path, "expected mono, got " + std::to_string(channels) + " channels");
  if (rate == 0) fail(path, "zero sample rate");

  Waveform wave;
  wave.sample_rate_hz = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    std::size_t count = payload_size / 2;
    wave.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto v = static_cast<std::int16_t>(read_u16(payload + 2 * i));
      wave.samples[i] = v / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    std::size_t count = payload_size / 4;
    wave.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t raw = read_u32(payload + 4 * i);
      float f;
      std::memcpy(&f, &raw, sizeof f);
      wave.samples[i] = f;
    }
  } else {
    fail(path, "unsupported encoding (format " + std::to_string(format) + ", " +
                   std::to_string(bits) + " bits); expected PCM16 or float32");
  }
  return wave;
}

void write(const std::filesystem::path& path, const Waveform& wave) {
  const auto count = static_cast<std::uint32_t>(wave.samples.size());
  const std::uint32_t data_bytes = count * 4;
  std::string out;
  out.reserve(58 + data_bytes);
  out += "RIFF";
  put_u32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 18);
  put_u16(out, kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(wave.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(wave.sample_rate_hz) * 4);
  put_u16(out, 4);
  put_u16(out, 32);
  put_u16(out, 0);
  out += "fact";
  put_u32(out, 4);
  put_u32(out, count);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : wave.samples) {
    float f = static_cast<float>(s);
    std::uint32_t raw;
    std::memcpy(&raw, &f, sizeof raw);
    put_u32(out, raw);
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

}  // namespace echopad::wav
