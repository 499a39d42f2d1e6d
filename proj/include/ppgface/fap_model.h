// include/ppgface/fap_model.h

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

#ifndef PPGFACE_FAP_MODEL_H_
#define PPGFACE_FAP_MODEL_H_

#include <array>
#include <string>
#include <vector>

#include "ppgface/corpus.h"
#include "ppgface/features.h"
#include "ppgface/nnet.h"
#include "ppgface/phoneme_space.h"
#include "ppgface/trajectory.h"

namespace ppgface {

// BLSTM sequence regressor: per-frame [acoustic features ; energy ;
// emotion one-hot] -> 96-dim FAP means (32 static + 32 delta + 32
// accel) for MLPG.

struct FapPredictorConfig {
  int blstm_layers = 3;
  int blstm_units = 128;  // per direction
  int dense_layers = 2;
  int dense_units = 96;
  double zoneout = 0.1;
  int feature_dim = 0;     // P for PPG input, 39 for the MFCC baseline
  bool use_energy = true;  // ablation switch for the silence A/B property
  int output_dim = 3 * kFapDim;

  int input_dim() const { return feature_dim + (use_energy ? 1 : 0) + 4; }
  void Validate() const;
};

struct FapModel {
  FapPredictorConfig cfg;
  // Checksum of the phoneme space the model was trained against; 0 for
  // non-PPG (baseline) inputs. PPGs with a different checksum are refused.
  uint64_t space_checksum = 0;
  // Energy z-normalization statistics, frozen at training time.
  double energy_mean = 0.0;
  double energy_std = 1.0;

  std::vector<nnet::Blstm> blstm;
  std::vector<nnet::Dense> dense;  // tanh hidden layers
  nnet::Dense out;                 // linear, dense_units -> output_dim
  GlobalVariance gv;               // of the training targets, for MLPG

  // Per-dim target normalization, frozen at training time. The network
  // regresses normalized targets so the delta/accel streams (orders of
  // magnitude smaller than the statics, but weighted by 1/variance in
  // MLPG) get a commensurate share of the MSE gradient; inference
  // denormalizes.
  Vec target_mean, target_std;  // output_dim each

  void Collect(std::vector<Mat *> &params);
  int64_t NumParams() const;
};

FapModel BuildFapModel(const FapPredictorConfig &cfg, uint64_t seed);

/// Sets the frozen energy statistics from raw per-frame log energies
/// pooled over the training corpus.
void SetEnergyStats(FapModel *model, const std::vector<FeatureMatrix> &energies);

/// Per-frame concatenation [features ; z-normalized energy ; emotion
/// one-hot]. The energy column is dropped when cfg.use_energy is false.
/// Throws LengthMismatch if frame counts differ.
Mat AssembleInput(const FapModel &model, const Mat &features,
                  const FeatureMatrix &energy, Emotion emotion);

/// PPG-input variant; additionally throws SpaceMismatch unless the PPG's
/// checksum equals model.space_checksum.
Mat AssembleInput(const FapModel &model, const Ppg &ppg,
                  const FeatureMatrix &energy, Emotion emotion);

struct FapExample {
  Mat input;    // T x input_dim, from AssembleInput
  Mat target;   // T x 96 dynamic-feature targets (ApplyMlpgWindows)
  Emotion emotion = Emotion::kNeutral;
};

struct FapTrainConfig {
  int max_epochs = 12;
  double lr = 1e-3;
  double clip_norm = 5.0;
  uint64_t seed = 1;
};

struct FapTrainReport {
  std::vector<double> epoch_loss;                  // train MSE per epoch
  std::vector<double> epoch_heldout_mse;           // held-out MSE per epoch
  std::array<double, kNumEmotions> heldout_mse_per_emotion{};  // final epoch
  int epochs_run = 0;
};

/// Per-utterance BPTT with Bernoulli zoneout masks drawn from the seeded
/// RNG; Adam + global-norm clipping. Every 10th example is held out for
/// the MSE estimates. Also computes model->gv from the training targets.
/// Deterministic given cfg.seed.
FapTrainReport TrainFap(FapModel *model, const std::vector<FapExample> &dataset,
                        const FapTrainConfig &cfg);

/// Deterministic inference (zoneout expectation blend): T x 96 means.
Mat PredictFapMeans(const FapModel &model, const Mat &input);

void SaveFapModel(const std::string &path, const FapModel &model);
FapModel LoadFapModel(const std::string &path);

}  // namespace ppgface

#endif  // PPGFACE_FAP_MODEL_H_
