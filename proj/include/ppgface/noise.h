// include/ppgface/noise.h

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

#ifndef PPGFACE_NOISE_H_
#define PPGFACE_NOISE_H_

#include <array>
#include <cstdint>
#include <string>

#include "ppgface/features.h"
#include "ppgface/rng.h"
#include "ppgface/wav.h"

namespace ppgface {

enum class NoiseKind { kWhite, kPink, kHumOffice, kBabble };

constexpr std::array<NoiseKind, 4> kAllNoiseKinds = {
    NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kHumOffice,
    NoiseKind::kBabble};

std::string NoiseKindName(NoiseKind kind);
NoiseKind NoiseKindFromName(const std::string &name);

/// Deterministic unit-RMS noise of the given kind. Samples are not
/// range-limited; they are scaled down during mixing.
Waveform SynthNoise(NoiseKind kind, size_t length, uint64_t seed);

/// Mixes noise into clean speech at the requested SNR. Noise is cropped
/// at an rng-drawn offset; powers are measured over active-speech frames
/// (clean frame energy above ln(mel_floor)+2). Output is clipped to [-1,1].
Waveform MixNoise(const Waveform &clean, const Waveform &noise, double snr_db,
                  RngStream &rng, const FrameConfig &cfg = FrameConfig());

/// SNR in dB of (noisy - clean) vs clean over active-speech frames of the
/// clean signal. Used as the independent check of MixNoise.
double MeasureSnrDb(const Waveform &clean, const Waveform &noisy,
                    const FrameConfig &cfg = FrameConfig());

}  // namespace ppgface

#endif  // PPGFACE_NOISE_H_
