// include/ppgface/config.h

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

#ifndef PPGFACE_CONFIG_H_
#define PPGFACE_CONFIG_H_

#include <string>

#include "ppgface/corpus.h"
#include "ppgface/eval.h"
#include "ppgface/fap_model.h"
#include "ppgface/ppg_model.h"

namespace ppgface {

// key=value run configuration with [section] headers. Every key has a
// documented default (the struct initializers below); unknown sections
// or keys are hard errors. '#' starts a comment; blank lines ignored.
//
// Sections and keys:
//   [corpus]  train_speakers test_speakers utts_per_speaker min_dur_ms
//             max_dur_ms seed
//   [ppg]     context conv_channels dense_layers dense_units max_epochs
//             batch_frames lr clip_norm target_accuracy seed
//             noise_augment_copies
//   [fap]     blstm_layers blstm_units dense_layers dense_units zoneout
//             use_energy max_epochs lr clip_norm seed
//   [eval]    n_samples seed

struct RunConfig {
  CorpusConfig corpus;
  PpgExtractorConfig ppg;
  PpgTrainConfig ppg_train;
  FapPredictorConfig fap;  // feature_dim is filled in when a model is built
  FapTrainConfig fap_train;
  EvalOptions eval;

  // Noisy copies of each PPG training utterance (beyond the clean one),
  // mixed at an SNR drawn uniformly from the sweep grid. 0 disables
  // noise augmentation.
  int noise_augment_copies = 1;

  void Validate() const;
};

RunConfig ParseRunConfig(const std::string &text);
RunConfig LoadRunConfig(const std::string &path);

}  // namespace ppgface

#endif  // PPGFACE_CONFIG_H_
