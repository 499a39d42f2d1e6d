// src/fap_model.cc

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

#include "ppgface/fap_model.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "ppgface/checkpoint.h"
#include "ppgface/rng.h"

namespace ppgface {

using nnet::Activation;
using nnet::Blstm;
using nnet::Dense;

void FapPredictorConfig::Validate() const {
  PPGFACE_CHECK(blstm_layers >= 1 && blstm_units >= 1,
                "FapPredictorConfig: BLSTM stack must be non-empty");
  PPGFACE_CHECK(dense_layers >= 1 && dense_units >= 1,
                "FapPredictorConfig: dense stack must be non-empty");
  PPGFACE_CHECK(zoneout >= 0.0 && zoneout < 1.0,
                "FapPredictorConfig: zoneout must be in [0, 1)");
  PPGFACE_CHECK(feature_dim >= 1, "FapPredictorConfig: feature_dim >= 1");
  PPGFACE_CHECK(output_dim >= 1, "FapPredictorConfig: output_dim >= 1");
}

void FapModel::Collect(std::vector<Mat *> &params) {
  for (Blstm &l : blstm) l.Collect(params);
  for (Dense &d : dense) d.Collect(params);
  out.Collect(params);
}

int64_t FapModel::NumParams() const {
  int64_t n = 0;
  for (const Blstm &l : blstm)
    for (const nnet::LstmCell *c : {&l.fwd, &l.bwd})
      n += c->W_x.size() + c->W_h.size() + c->b.size();
  for (const Dense &d : dense) n += d.W.size() + d.b.size();
  return n + out.W.size() + out.b.size();
}

FapModel BuildFapModel(const FapPredictorConfig &cfg, uint64_t seed) {
  cfg.Validate();
  RngStream rng(seed);
  FapModel m;
  m.cfg = cfg;
  int in = cfg.input_dim();
  for (int i = 0; i < cfg.blstm_layers; i++) {
    m.blstm.push_back(
        Blstm::Create(in, cfg.blstm_units, cfg.zoneout, cfg.zoneout, rng));
    in = 2 * cfg.blstm_units;
  }
  for (int i = 0; i < cfg.dense_layers; i++) {
    m.dense.push_back(Dense::Create(in, cfg.dense_units, Activation::kTanh, rng));
    in = cfg.dense_units;
  }
  m.out = Dense::Create(in, cfg.output_dim, Activation::kLinear, rng);
  m.gv.v = Vec::Ones(cfg.output_dim);
  m.target_mean = Vec::Zero(cfg.output_dim);
  m.target_std = Vec::Ones(cfg.output_dim);
  return m;
}

void SetEnergyStats(FapModel *model, const std::vector<FeatureMatrix> &energies) {
  double sum = 0.0, sq = 0.0;
  int64_t n = 0;
  for (const FeatureMatrix &e : energies) {
    if (e.Dim() != 1)
      throw ShapeMismatch("SetEnergyStats: energy streams must have 1 column");
    sum += e.data.sum();
    sq += e.data.array().square().sum();
    n += e.NumFrames();
  }
  PPGFACE_CHECK(n >= 2, "SetEnergyStats: need at least 2 frames");
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  model->energy_mean = mean;
  model->energy_std = std::sqrt(std::max(var, 1e-12));
}

Mat AssembleInput(const FapModel &model, const Mat &features,
                  const FeatureMatrix &energy, Emotion emotion) {
  if (features.cols() != model.cfg.feature_dim)
    throw ShapeMismatch("AssembleInput: feature dim " +
                        std::to_string(features.cols()) + ", expected " +
                        std::to_string(model.cfg.feature_dim));
  if (features.rows() != energy.NumFrames())
    throw LengthMismatch("AssembleInput: " + std::to_string(features.rows()) +
                         " feature frames vs " +
                         std::to_string(energy.NumFrames()) + " energy frames");
  const Eigen::Index T = features.rows();
  Mat x(T, model.cfg.input_dim());
  x.leftCols(features.cols()) = features;
  if (model.cfg.use_energy) {
    x.col(features.cols()) = (energy.data.col(0).array() - model.energy_mean) /
                             model.energy_std;
  }
  x.rightCols(4).rowwise() = EmotionOneHot(emotion);
  return x;
}

Mat AssembleInput(const FapModel &model, const Ppg &ppg,
                  const FeatureMatrix &energy, Emotion emotion) {
  if (ppg.space_checksum != model.space_checksum)
    throw SpaceMismatch("AssembleInput: PPG space checksum " +
                        std::to_string(ppg.space_checksum) +
                        " does not match the model's " +
                        std::to_string(model.space_checksum));
  return AssembleInput(model, ppg.matrix, energy, emotion);
}

namespace {

struct ForwardCache {
  std::vector<nnet::BlstmCache> blstm;
  std::vector<nnet::DenseCache> dense;
  nnet::DenseCache out;
};

Mat Forward(const FapModel &m, const Mat &x, bool training, RngStream *rng,
            ForwardCache *cache) {
  if (cache) {
    cache->blstm.resize(m.blstm.size());
    cache->dense.resize(m.dense.size());
  }
  Mat h = x;
  for (size_t i = 0; i < m.blstm.size(); i++)
    h = BlstmForward(m.blstm[i], h, training, rng,
                     cache ? &cache->blstm[i] : nullptr);
  for (size_t i = 0; i < m.dense.size(); i++)
    h = DenseForward(m.dense[i], h, cache ? &cache->dense[i] : nullptr);
  return DenseForward(m.out, h, cache ? &cache->out : nullptr);
}

void Backward(const FapModel &m, const ForwardCache &cache, const Mat &dy,
              FapModel *grad) {
  Mat dh = DenseBackward(m.out, cache.out, dy, &grad->out);
  for (size_t i = m.dense.size(); i-- > 0;)
    dh = DenseBackward(m.dense[i], cache.dense[i], dh, &grad->dense[i]);
  for (size_t i = m.blstm.size(); i-- > 0;)
    dh = BlstmBackward(m.blstm[i], cache.blstm[i], dh, &grad->blstm[i]);
}

FapModel ZeroLike(const FapModel &m) {
  FapModel g;
  g.cfg = m.cfg;
  for (const Blstm &l : m.blstm) g.blstm.push_back(l.ZeroLike());
  for (const Dense &d : m.dense) g.dense.push_back(d.ZeroLike());
  g.out = m.out.ZeroLike();
  return g;
}

void ValidateDataset(const FapModel &m, const std::vector<FapExample> &dataset) {
  PPGFACE_CHECK(!dataset.empty(), "TrainFap: empty dataset");
  for (const FapExample &e : dataset) {
    if (e.input.cols() != m.cfg.input_dim())
      throw ShapeMismatch("TrainFap: input dim " +
                          std::to_string(e.input.cols()) + ", expected " +
                          std::to_string(m.cfg.input_dim()));
    if (e.target.cols() != m.cfg.output_dim)
      throw ShapeMismatch("TrainFap: target dim " +
                          std::to_string(e.target.cols()) + ", expected " +
                          std::to_string(m.cfg.output_dim));
    if (e.input.rows() != e.target.rows())
      throw LengthMismatch("TrainFap: input/target frame counts differ");
    PPGFACE_CHECK(e.input.rows() > 0, "TrainFap: empty example");
  }
}

Mat Denormalize(const FapModel &m, Mat pred) {
  pred.array().rowwise() *= m.target_std.transpose().array();
  pred.rowwise() += m.target_mean.transpose();
  return pred;
}

// MSE in the denormalized (actual target) space.
double HeldoutMse(const FapModel &m, const std::vector<FapExample> &examples) {
  double num = 0.0;
  int64_t frames = 0;
  for (const FapExample &e : examples) {
    const Mat pred = Denormalize(
        m, Forward(m, e.input, /*training=*/false, nullptr, nullptr));
    num += (pred - e.target).array().square().sum();
    frames += e.target.size();
  }
  return num / static_cast<double>(frames);
}

std::string FmtG17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

FapTrainReport TrainFap(FapModel *model, const std::vector<FapExample> &dataset,
                        const FapTrainConfig &cfg) {
  ValidateDataset(*model, dataset);
  RngStream rng(cfg.seed);

  std::vector<int> train_idx;
  std::vector<const FapExample *> heldout;
  for (size_t i = 0; i < dataset.size(); i++) {
    if (dataset.size() >= 10 && i % 10 == 9)
      heldout.push_back(&dataset[i]);
    else
      train_idx.push_back(static_cast<int>(i));
  }

  {
    std::vector<Mat> targets;
    for (int i : train_idx) targets.push_back(dataset[i].target);
    model->gv = ComputeGlobalVariance(targets);

    Vec sum = Vec::Zero(model->cfg.output_dim);
    Vec sq = Vec::Zero(model->cfg.output_dim);
    int64_t n = 0;
    for (const Mat &t : targets) {
      sum += t.colwise().sum().transpose();
      sq += t.array().square().colwise().sum().matrix().transpose();
      n += t.rows();
    }
    model->target_mean = sum / static_cast<double>(n);
    model->target_std =
        (sq.array() / static_cast<double>(n) -
         model->target_mean.array().square())
            .max(1e-12)
            .sqrt()
            .max(1e-4)
            .matrix();
  }

  std::vector<Mat *> params;
  model->Collect(params);
  nnet::AdamState adam;

  FapTrainReport report;
  for (int epoch = 0; epoch < cfg.max_epochs; epoch++) {
    RngStream shuffle = rng.Fork("shuffle/" + std::to_string(epoch));
    for (size_t i = train_idx.size(); i > 1; i--)
      std::swap(train_idx[i - 1], train_idx[shuffle.UniformInt(i)]);

    double loss_sum = 0.0;
    for (int idx : train_idx) {
      const FapExample &e = dataset[idx];
      // Mask stream keyed by (epoch, example), not visit order, so the
      // draws are stable under any shuffle.
      RngStream mask = rng.Fork("mask/" + std::to_string(epoch) + "/" +
                                std::to_string(idx));
      Mat norm_target = e.target;
      norm_target.rowwise() -= model->target_mean.transpose();
      norm_target.array().rowwise() /= model->target_std.transpose().array();

      ForwardCache cache;
      const Mat pred = Forward(*model, e.input, /*training=*/true, &mask, &cache);
      Mat dpred;
      nnet::MseLoss(pred, norm_target, &dpred);
      // Report the loss in the denormalized target space; the gradient
      // is taken in the normalized space.
      loss_sum += (Denormalize(*model, pred) - e.target).array().square().mean();

      FapModel grad = ZeroLike(*model);
      Backward(*model, cache, dpred, &grad);
      std::vector<Mat *> gptrs;
      grad.Collect(gptrs);
      nnet::ClipGlobalNorm(gptrs, cfg.clip_norm);
      std::vector<const Mat *> grads(gptrs.begin(), gptrs.end());
      nnet::AdamStep(params, grads, &adam, cfg.lr);
    }

    report.epoch_loss.push_back(loss_sum / train_idx.size());
    if (heldout.empty()) {
      report.epoch_heldout_mse.push_back(HeldoutMse(*model, dataset));
    } else {
      std::vector<FapExample> hs;
      for (const FapExample *e : heldout) hs.push_back(*e);
      report.epoch_heldout_mse.push_back(HeldoutMse(*model, hs));
    }
    report.epochs_run = epoch + 1;
  }

  for (int em = 0; em < kNumEmotions; em++) {
    std::vector<FapExample> subset;
    const auto &pool = heldout;
    if (pool.empty()) {
      for (const FapExample &e : dataset)
        if (static_cast<int>(e.emotion) == em) subset.push_back(e);
    } else {
      for (const FapExample *e : pool)
        if (static_cast<int>(e->emotion) == em) subset.push_back(*e);
    }
    report.heldout_mse_per_emotion[em] =
        subset.empty() ? std::nan("") : HeldoutMse(*model, subset);
  }
  return report;
}

Mat PredictFapMeans(const FapModel &model, const Mat &input) {
  if (input.cols() != model.cfg.input_dim())
    throw ShapeMismatch("PredictFapMeans: input dim " +
                        std::to_string(input.cols()) + ", expected " +
                        std::to_string(model.cfg.input_dim()));
  if (input.rows() == 0) return Mat(0, model.cfg.output_dim);
  return Denormalize(model,
                     Forward(model, input, /*training=*/false, nullptr, nullptr));
}

void SaveFapModel(const std::string &path, const FapModel &model) {
  Checkpoint ck;
  ck.header["model"] = "fap";
  ck.header["space_checksum"] = std::to_string(model.space_checksum);
  ck.header["energy_mean"] = FmtG17(model.energy_mean);
  ck.header["energy_std"] = FmtG17(model.energy_std);
  ck.header["emotion_set"] = "neutral,angry,happy,sad";
  ck.header["blstm_layers"] = std::to_string(model.cfg.blstm_layers);
  ck.header["blstm_units"] = std::to_string(model.cfg.blstm_units);
  ck.header["dense_layers"] = std::to_string(model.cfg.dense_layers);
  ck.header["dense_units"] = std::to_string(model.cfg.dense_units);
  ck.header["zoneout"] = FmtG17(model.cfg.zoneout);
  ck.header["feature_dim"] = std::to_string(model.cfg.feature_dim);
  ck.header["use_energy"] = model.cfg.use_energy ? "1" : "0";
  ck.header["output_dim"] = std::to_string(model.cfg.output_dim);

  for (size_t i = 0; i < model.blstm.size(); i++) {
    const std::string p = "blstm" + std::to_string(i) + ".";
    const Blstm &l = model.blstm[i];
    ck.tensors.emplace_back(p + "fwd.W_x", l.fwd.W_x);
    ck.tensors.emplace_back(p + "fwd.W_h", l.fwd.W_h);
    ck.tensors.emplace_back(p + "fwd.b", l.fwd.b);
    ck.tensors.emplace_back(p + "bwd.W_x", l.bwd.W_x);
    ck.tensors.emplace_back(p + "bwd.W_h", l.bwd.W_h);
    ck.tensors.emplace_back(p + "bwd.b", l.bwd.b);
  }
  for (size_t i = 0; i < model.dense.size(); i++) {
    ck.tensors.emplace_back("dense" + std::to_string(i) + ".W", model.dense[i].W);
    ck.tensors.emplace_back("dense" + std::to_string(i) + ".b", model.dense[i].b);
  }
  ck.tensors.emplace_back("out.W", model.out.W);
  ck.tensors.emplace_back("out.b", model.out.b);
  ck.tensors.emplace_back("gv", Mat(model.gv.v.transpose()));
  ck.tensors.emplace_back("target_mean", Mat(model.target_mean.transpose()));
  ck.tensors.emplace_back("target_std", Mat(model.target_std.transpose()));
  WriteNnck(path, ck);
}

FapModel LoadFapModel(const std::string &path) {
  const Checkpoint ck = ReadNnck(path);
  if (ck.Header("model") != "fap")
    throw DataError("LoadFapModel: not a fap checkpoint: " + path);
  FapPredictorConfig cfg;
  cfg.blstm_layers = std::stoi(ck.Header("blstm_layers"));
  cfg.blstm_units = std::stoi(ck.Header("blstm_units"));
  cfg.dense_layers = std::stoi(ck.Header("dense_layers"));
  cfg.dense_units = std::stoi(ck.Header("dense_units"));
  cfg.zoneout = std::stod(ck.Header("zoneout"));
  cfg.feature_dim = std::stoi(ck.Header("feature_dim"));
  cfg.use_energy = ck.Header("use_energy") == "1";
  cfg.output_dim = std::stoi(ck.Header("output_dim"));

  FapModel m = BuildFapModel(cfg, /*seed=*/0);
  m.space_checksum = std::stoull(ck.Header("space_checksum"));
  m.energy_mean = std::stod(ck.Header("energy_mean"));
  m.energy_std = std::stod(ck.Header("energy_std"));
  if (ck.Header("emotion_set") != "neutral,angry,happy,sad")
    throw DataError("LoadFapModel: unexpected emotion set in " + path);

  for (size_t i = 0; i < m.blstm.size(); i++) {
    const std::string p = "blstm" + std::to_string(i) + ".";
    Blstm &l = m.blstm[i];
    l.fwd.W_x = ck.Tensor(p + "fwd.W_x");
    l.fwd.W_h = ck.Tensor(p + "fwd.W_h");
    l.fwd.b = ck.Tensor(p + "fwd.b");
    l.bwd.W_x = ck.Tensor(p + "bwd.W_x");
    l.bwd.W_h = ck.Tensor(p + "bwd.W_h");
    l.bwd.b = ck.Tensor(p + "bwd.b");
  }
  for (int i = 0; i < cfg.dense_layers; i++) {
    m.dense[i].W = ck.Tensor("dense" + std::to_string(i) + ".W");
    m.dense[i].b = ck.Tensor("dense" + std::to_string(i) + ".b");
  }
  m.out.W = ck.Tensor("out.W");
  m.out.b = ck.Tensor("out.b");
  m.gv.v = ck.Tensor("gv").row(0).transpose();
  m.target_mean = ck.Tensor("target_mean").row(0).transpose();
  m.target_std = ck.Tensor("target_std").row(0).transpose();
  PPGFACE_CHECK((m.gv.v.array() > 0).all(), "LoadFapModel: non-positive gv");
  PPGFACE_CHECK((m.target_std.array() > 0).all(),
                "LoadFapModel: non-positive target_std");
  return m;
}

}  // namespace ppgface
