// include/ppgface/eval.h

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

#ifndef PPGFACE_EVAL_H_
#define PPGFACE_EVAL_H_

#include <optional>
#include <string>
#include <vector>

#include "ppgface/corpus.h"
#include "ppgface/fap_model.h"
#include "ppgface/ppg_model.h"

namespace ppgface {

// ----------------------------------------------------------------------
// Metrics.

/// Mean over all entries of the squared difference. ShapeMismatch on
/// unequal shapes.
double Mse(const Mat &pred, const Mat &gt);

/// Per-column Pearson correlation. Columns where either side is constant
/// yield 0 (no linear relationship measurable).
Vec PearsonPerDim(const Mat &pred, const Mat &gt);

// ----------------------------------------------------------------------
// MFCC baseline features: 13 cepstra (orthonormal DCT-II of the 40
// log-mel bins) plus delta and delta-delta = 39 dims, same framing as
// log_mel.

constexpr int kNumCepstra = 13;

FeatureMatrix MfccBaselineFeatures(const Waveform &wave,
                                   const FrameConfig &cfg = FrameConfig());

// ----------------------------------------------------------------------
// Systems and the end-to-end pipeline.

/// A named audio-to-FAP system. ppg == nullptr selects the MFCC-baseline
/// front end; the FAP model must have the matching feature_dim either way.
struct System {
  std::string name;
  const PpgModel *ppg = nullptr;
  const FapModel *fap = nullptr;
};

enum class SmoothMode { kMlpg, kWindow, kNone };

/// audio -> features -> PPG/MFCC -> [input ; energy ; emotion] -> BLSTM
/// means -> smoothing. Returns T x 32 statics for kMlpg/kWindow, the raw
/// T x 96 means for kNone.
Mat RunPipeline(const System &sys, const Waveform &wave, Emotion emotion,
                SmoothMode mode = SmoothMode::kMlpg);

// ----------------------------------------------------------------------
// Reports.

struct EvalRow {
  std::string system;
  std::string split;
  std::optional<double> snr_db;  // empty for non-sweep rows
  double mse = 0.0;
  double pearson_mean = 0.0;
  int64_t n = 0;  // utterances aggregated
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

/// CSV with fixed header `system,split,snr_db,mse,pearson_mean,n`;
/// reals serialized at full precision so parse-back is exact.
void EmitCsv(const std::string &path, const EvalReport &report);
EvalReport ParseCsv(const std::string &path);

// ----------------------------------------------------------------------
// Harness runs. Per-utterance work parallelizes; aggregation happens in
// manifest order so results are independent of n_threads.

struct EvalOptions {
  int n_samples = 500;  // capped at the split size
  uint64_t seed = 1;
  int n_threads = 1;
};

/// One row per system over the first min(n_samples, split size)
/// utterances of the split; mse / pearson_mean are utterance means
/// against the corpus oracle FAPs. Throws DataError on an empty split.
EvalReport RunSplitEval(const std::vector<System> &systems,
                        const CorpusManifest &manifest,
                        const std::string &corpus_dir, const std::string &split,
                        const EvalOptions &opts = EvalOptions());

/// Default 9-level grid, 25 dB down to -15 dB in 5 dB steps.
std::vector<double> DefaultSnrGrid();

/// One row per (system, snr). Each utterance x snr draws a noise kind
/// and noise seed from opts.seed, mixes with MixNoise, and runs the
/// identical noisy waveform through every system.
EvalReport RunSnrSweep(const std::vector<System> &systems,
                       const CorpusManifest &manifest,
                       const std::string &corpus_dir, const std::string &split,
                       const std::vector<double> &snr_grid = DefaultSnrGrid(),
                       const EvalOptions &opts = EvalOptions());

}  // namespace ppgface

#endif  // PPGFACE_EVAL_H_
