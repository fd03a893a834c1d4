// include/echopad/wav_io.hpp

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

#include <filesystem>

#include "echopad/waveform.hpp"

namespace echopad::wav {

// Reads a mono RIFF/WAVE file. PCM16 and IEEE float32 payloads are accepted
// (including WAVE_FORMAT_EXTENSIBLE wrappers); PCM16 is scaled by 1/32768.
Waveform read(const std::filesystem::path& path);

// Writes mono IEEE float32. Samples are stored as-is, no clipping.
void write(const std::filesystem::path& path, const Waveform& wave);

}  // namespace echopad::wav
