// include/ppgface/pipeline.h

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

#ifndef PPGFACE_PIPELINE_H_
#define PPGFACE_PIPELINE_H_

#include <string>
#include <vector>

#include "ppgface/config.h"
#include "ppgface/corpus.h"
#include "ppgface/eval.h"
#include "ppgface/fap_model.h"
#include "ppgface/ppg_model.h"

namespace ppgface {

// Training-stage glue shared by the CLI and the acceptance harness.

/// Sub-space containing only the given languages' units (order preserved).
PhonemeSpace SubspaceForLanguages(const PhonemeSpace &space,
                                  const std::vector<std::string> &languages);

/// PPG training frames (120-dim log-mel dynamics, per-frame labels) from
/// the given manifest splits. Records whose language is missing from the
/// space are rejected (SpaceMismatch). noise_augment_copies extra noisy
/// copies per utterance are mixed at SNRs and noise kinds drawn from
/// seed, keyed by utterance id so the dataset is order- and
/// thread-independent.
std::vector<PpgExample> BuildPpgDataset(
    const CorpusManifest &manifest, const std::string &corpus_dir,
    const PhonemeSpace &space, const std::vector<std::string> &splits,
    int noise_augment_copies, uint64_t seed, int n_threads = 1);

/// FAP training examples for the splits: assembled [features ; energy ;
/// emotion] inputs and windowed dynamic targets. Sets model->space_checksum
/// and the frozen energy stats (from the same utterances) first.
/// ppg == nullptr selects the MFCC baseline front end.
std::vector<FapExample> BuildFapDataset(FapModel *model, const PpgModel *ppg,
                                        const CorpusManifest &manifest,
                                        const std::string &corpus_dir,
                                        const std::vector<std::string> &splits,
                                        int n_threads = 1);

/// Trains the PPG extractor on the corpus "train" split over the given
/// training language(s) (default: the first language in the space).
PpgModel TrainPpgPipeline(const RunConfig &cfg, const CorpusManifest &manifest,
                          const std::string &corpus_dir,
                          const std::vector<std::string> &languages,
                          int n_threads = 1);

/// Trains a FAP predictor on the corpus "train" split; ppg == nullptr
/// builds the MFCC baseline with the otherwise identical configuration.
FapModel TrainFapPipeline(const RunConfig &cfg, const PpgModel *ppg,
                          const CorpusManifest &manifest,
                          const std::string &corpus_dir, int n_threads = 1);

}  // namespace ppgface

#endif  // PPGFACE_PIPELINE_H_
