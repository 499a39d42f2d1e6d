// include/ppgface/wav.h

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

#ifndef PPGFACE_WAV_H_
#define PPGFACE_WAV_H_

#include <string>
#include <vector>

#include "ppgface/common.h"

namespace ppgface {

constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRate;

  size_t NumSamples() const { return samples.size(); }
  double DurationSec() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  /// Ingestion invariants: 16 kHz, finite, |sample| <= 1.
  void Validate() const;
};

/// Reads a RIFF/WAVE file. Accepts PCM 16-bit LE mono 16 kHz only;
/// anything else is a DataError.
Waveform ReadWav(const std::string &path);

/// Writes PCM 16-bit LE mono 16 kHz. Samples are clamped to [-1, 1].
void WriteWav(const std::string &path, const Waveform &wave);

}  // namespace ppgface

#endif  // PPGFACE_WAV_H_
