// include/ppgface/features.h

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

#ifndef PPGFACE_FEATURES_H_
#define PPGFACE_FEATURES_H_

#include <cstdint>
#include <mutex>

#include "ppgface/common.h"
#include "ppgface/wav.h"

namespace ppgface {

enum class FeatureKind : uint8_t {
  kGeneric = 0,
  kLogMel = 1,
  kEnergy = 2,
  kPpg = 3,
  kFap = 4,
};

struct FrameConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int n_fft = 512;
  int n_mels = 40;
  double mel_floor = 1e-10;
  double preemphasis = 0.97;

  int FrameLengthSamples() const {
    return static_cast<int>(frame_length_ms * kSampleRate / 1000.0 + 0.5);
  }
  int FrameShiftSamples() const {
    return static_cast<int>(frame_shift_ms * kSampleRate / 1000.0 + 0.5);
  }
  void Validate() const;
};

struct FeatureMatrix {
  Mat data;  // T x D
  double frame_shift_ms = 10.0;
  FeatureKind kind = FeatureKind::kGeneric;

  Eigen::Index NumFrames() const { return data.rows(); }
  Eigen::Index Dim() const { return data.cols(); }
};

/// Number of frames produced by the shared framing of log_mel /
/// frame_energy on a waveform of n samples. Throws DataError if zero.
Eigen::Index NumFramesFor(size_t n_samples, const FrameConfig &cfg);

/// 40-band log mel-filterbank features: pre-emphasis, Hamming window,
/// magnitude-squared FFT, triangular mel filters over 0..8000 Hz,
/// natural log with floor.
FeatureMatrix LogMel(const Waveform &wave, const FrameConfig &cfg);

/// Per-frame log energy ln(sum s_i^2) over the Hamming-windowed frame,
/// no pre-emphasis. Same framing (and frame count) as LogMel.
FeatureMatrix FrameEnergy(const Waveform &wave, const FrameConfig &cfg);

/// Appends delta and delta-delta streams (regression window N=2 with
/// edge replication): output row t = [static_t ; delta_t ; deltadelta_t].
FeatureMatrix DynamicFeatures(const FeatureMatrix &m);

/// Center frequency in Hz of mel bin m (0-based) for the given config.
/// Exposed so callers can reason about bin semantics.
double MelBinCenterHz(const FrameConfig &cfg, int bin);

/// Guards FFTW plan creation/destruction, which is not thread-safe.
std::mutex &FftwPlanMutex();

}  // namespace ppgface

#endif  // PPGFACE_FEATURES_H_
