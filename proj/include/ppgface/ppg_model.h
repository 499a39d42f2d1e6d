// include/ppgface/ppg_model.h

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

#ifndef PPGFACE_PPG_MODEL_H_
#define PPGFACE_PPG_MODEL_H_

#include <string>
#include <vector>

#include "ppgface/features.h"
#include "ppgface/nnet.h"
#include "ppgface/phoneme_space.h"

namespace ppgface {

// SI-ASR-style frame classifier: conv1d(120 -> conv_channels, kernel
// 2*context+1, ReLU), dense_layers x dense(dense_units, ReLU), then a
// linear softmax head over the phoneme space.

struct PpgExtractorConfig {
  int context = 10;
  int conv_channels = 512;
  int dense_layers = 4;
  int dense_units = 512;
  int input_dim = 120;  // 40 mel x (static + delta + delta-delta)

  int conv_kernel() const { return 2 * context + 1; }
  void Validate() const;
};

struct PpgModel {
  PpgExtractorConfig cfg;
  PhonemeSpace space;
  nnet::Conv1d conv;
  std::vector<nnet::Dense> dense;  // ReLU hidden layers
  nnet::Dense out;                 // linear head, dense_units -> P

  void Collect(std::vector<Mat *> &params);
  int64_t NumParams() const;
};

PpgModel BuildPpgModel(const PpgExtractorConfig &cfg, const PhonemeSpace &space,
                       uint64_t seed);

struct PpgExample {
  FeatureMatrix features;   // T x input_dim log-mel + dynamics
  std::vector<int> labels;  // T indices into the space
};

struct PpgTrainConfig {
  int max_epochs = 30;
  int batch_frames = 256;
  double lr = 1e-3;
  double clip_norm = 5.0;
  double target_accuracy = 0.97;  // early stop once held-out accuracy passes
  uint64_t seed = 1;
  // L2 penalty on weight matrices (not biases), added to the gradients of
  // the trainable parameters. Mainly a fine-tuning aid: it keeps freshly
  // trained softmax rows from out-growing frozen ones.
  double weight_decay = 0.0;
  bool freeze_trunk = false;  // fine-tuning: train only the softmax head
  int freeze_head_rows_below = 0;  // and freeze head rows < this index
  // Penalty 0.5*||W_new W_old^T||^2 on the trainable head rows against the
  // frozen ones (requires freeze_head_rows_below > 0). Frozen rows point at
  // the old units' feature clusters, so keeping new rows orthogonal to them
  // keeps new logits small on old-language frames — which nothing in a
  // new-language-only fine-tune set would otherwise enforce.
  double ortho_decay = 0.0;
  // L2 pull of the trunk weights toward their values at the start of
  // training. For fine-tuning on new-language data only: bounds feature
  // drift on the old languages (which the fine-tune set cannot measure)
  // while spare capacity remains free for the new units.
  double anchor_decay = 0.0;
};

struct PpgTrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_heldout_accuracy;
  int epochs_run = 0;
};

/// Cross-entropy training on shuffled frame minibatches. Every 10th
/// example is held out for the per-epoch accuracy estimate. Deterministic
/// given cfg.seed.
PpgTrainReport TrainPpg(PpgModel *model, const std::vector<PpgExample> &dataset,
                        const PpgTrainConfig &cfg);

/// Softmax posteriors for a whole utterance; output is row-stochastic
/// and stamped with the model's space checksum.
Ppg ExtractPpg(const PpgModel &model, const FeatureMatrix &features);

/// Frame accuracy of argmax posteriors against labels.
double PpgFrameAccuracy(const PpgModel &model,
                        const std::vector<PpgExample> &examples);

/// New model over an extended space: trunk and the softmax-head rows of
/// the original units are copied (indices are stable under extension);
/// rows for the appended units are freshly initialized.
PpgModel ExtendPpgModel(const PpgModel &model, const PhonemeSpace &extended,
                        uint64_t seed);

void SavePpgModel(const std::string &path, const PpgModel &model);
PpgModel LoadPpgModel(const std::string &path);

}  // namespace ppgface

#endif  // PPGFACE_PPG_MODEL_H_
