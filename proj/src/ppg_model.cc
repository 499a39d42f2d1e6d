// src/ppg_model.cc

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

#include "ppgface/ppg_model.h"

#include <algorithm>
#include <numeric>

#include "ppgface/checkpoint.h"
#include "ppgface/rng.h"

namespace ppgface {

using nnet::Activation;
using nnet::Dense;

void PpgExtractorConfig::Validate() const {
  PPGFACE_CHECK(context >= 0, "PpgExtractorConfig: context must be >= 0");
  PPGFACE_CHECK(conv_channels >= 1 && dense_units >= 1,
                "PpgExtractorConfig: layer widths must be positive");
  PPGFACE_CHECK(dense_layers >= 1, "PpgExtractorConfig: dense_layers >= 1");
  PPGFACE_CHECK(input_dim >= 1, "PpgExtractorConfig: input_dim >= 1");
}

void PpgModel::Collect(std::vector<Mat *> &params) {
  conv.Collect(params);
  for (Dense &d : dense) d.Collect(params);
  out.Collect(params);
}

int64_t PpgModel::NumParams() const {
  int64_t n = conv.K.size() + conv.b.size();
  for (const Dense &d : dense) n += d.W.size() + d.b.size();
  return n + out.W.size() + out.b.size();
}

PpgModel BuildPpgModel(const PpgExtractorConfig &cfg, const PhonemeSpace &space,
                       uint64_t seed) {
  cfg.Validate();
  PPGFACE_CHECK(space.size() >= 2, "BuildPpgModel: space needs >= 2 units");
  RngStream rng(seed);
  PpgModel m;
  m.cfg = cfg;
  m.space = space;
  m.conv = nnet::Conv1d::Create(cfg.input_dim, cfg.conv_channels,
                                cfg.conv_kernel(), rng);
  int in = cfg.conv_channels;
  for (int i = 0; i < cfg.dense_layers; i++) {
    m.dense.push_back(Dense::Create(in, cfg.dense_units, Activation::kRelu, rng));
    in = cfg.dense_units;
  }
  m.out = Dense::Create(in, static_cast<Eigen::Index>(space.size()),
                        Activation::kLinear, rng);
  return m;
}

namespace {

// Forward over pre-gathered context rows (B x kernel*input_dim); the
// conv layer acts as a dense layer on these rows.
struct ForwardCache {
  Mat h0;  // post-ReLU conv output
  std::vector<nnet::DenseCache> dense;
  nnet::DenseCache out;
};

Mat Forward(const PpgModel &m, const Mat &rows, ForwardCache *cache) {
  Mat h = rows * m.conv.K.transpose();
  h.rowwise() += m.conv.b.row(0);
  h = h.cwiseMax(0.0);
  if (cache) cache->h0 = h;
  if (cache) cache->dense.resize(m.dense.size());
  for (size_t i = 0; i < m.dense.size(); i++)
    h = DenseForward(m.dense[i], h, cache ? &cache->dense[i] : nullptr);
  return DenseForward(m.out, h, cache ? &cache->out : nullptr);
}

void Backward(const PpgModel &m, const Mat &rows, const ForwardCache &cache,
              const Mat &dlogits, nnet::Conv1d *gconv,
              std::vector<Dense> *gdense, Dense *gout) {
  Mat dh = DenseBackward(m.out, cache.out, dlogits, gout);
  for (size_t i = m.dense.size(); i-- > 0;)
    dh = DenseBackward(m.dense[i], cache.dense[i], dh, &(*gdense)[i]);
  dh = (dh.array() * (cache.h0.array() > 0).cast<double>()).matrix();
  gconv->K += dh.transpose() * rows;
  gconv->b.row(0) += dh.colwise().sum();
}

void ValidateDataset(const PpgModel &m, const std::vector<PpgExample> &dataset) {
  PPGFACE_CHECK(!dataset.empty(), "TrainPpg: empty dataset");
  const int P = static_cast<int>(m.space.size());
  for (const PpgExample &e : dataset) {
    if (e.features.Dim() != m.cfg.input_dim)
      throw ShapeMismatch("TrainPpg: feature dim " +
                          std::to_string(e.features.Dim()) + ", expected " +
                          std::to_string(m.cfg.input_dim));
    if (static_cast<Eigen::Index>(e.labels.size()) != e.features.NumFrames())
      throw LengthMismatch("TrainPpg: label stream does not match features");
    for (int l : e.labels)
      if (l < 0 || l >= P)
        throw SpaceMismatch("TrainPpg: label " + std::to_string(l) +
                            " outside the model's phoneme space");
  }
}

// Context rows for frames (example, t) listed in batch.
Mat GatherRows(const std::vector<PpgExample> &dataset,
               const std::vector<std::pair<int, int>> &frames, size_t lo,
               size_t hi, int kernel, int dim) {
  const int radius = kernel / 2;
  Mat rows = Mat::Zero(static_cast<Eigen::Index>(hi - lo),
                       static_cast<Eigen::Index>(kernel) * dim);
  for (size_t i = lo; i < hi; i++) {
    const auto &[e, t] = frames[i];
    const Mat &x = dataset[e].features.data;
    for (int j = 0; j < kernel; j++) {
      const int src = t + j - radius;
      if (src < 0 || src >= x.rows()) continue;
      rows.block(static_cast<Eigen::Index>(i - lo),
                 static_cast<Eigen::Index>(j) * dim, 1, dim) = x.row(src);
    }
  }
  return rows;
}

}  // namespace

PpgTrainReport TrainPpg(PpgModel *model, const std::vector<PpgExample> &dataset,
                        const PpgTrainConfig &cfg) {
  ValidateDataset(*model, dataset);
  RngStream rng(cfg.seed);

  // Every 10th example is held out for the accuracy estimate.
  std::vector<int> train_idx;
  std::vector<PpgExample> heldout;
  for (size_t i = 0; i < dataset.size(); i++) {
    if (dataset.size() >= 10 && i % 10 == 9)
      heldout.push_back(dataset[i]);
    else
      train_idx.push_back(static_cast<int>(i));
  }

  std::vector<std::pair<int, int>> frames;
  for (int e : train_idx)
    for (Eigen::Index t = 0; t < dataset[e].features.NumFrames(); t++)
      frames.emplace_back(e, static_cast<int>(t));
  PPGFACE_CHECK(!frames.empty(), "TrainPpg: no training frames");

  std::vector<Mat *> params;
  if (cfg.freeze_trunk) {
    model->out.Collect(params);
  } else {
    model->Collect(params);
  }
  nnet::AdamState adam;

  const bool anchored = cfg.anchor_decay > 0.0 && !cfg.freeze_trunk;
  Mat anchor_K;
  std::vector<Mat> anchor_W;
  if (anchored) {
    anchor_K = model->conv.K;
    for (const Dense &d : model->dense) anchor_W.push_back(d.W);
  }

  PpgTrainReport report;
  for (int epoch = 0; epoch < cfg.max_epochs; epoch++) {
    // Fisher-Yates with the per-epoch stream.
    RngStream shuffle = rng.Fork("shuffle/" + std::to_string(epoch));
    for (size_t i = frames.size(); i > 1; i--)
      std::swap(frames[i - 1], frames[shuffle.UniformInt(i)]);

    double loss_sum = 0.0;
    int steps = 0;
    for (size_t lo = 0; lo < frames.size();
         lo += static_cast<size_t>(cfg.batch_frames)) {
      const size_t hi =
          std::min(frames.size(), lo + static_cast<size_t>(cfg.batch_frames));
      const Mat rows = GatherRows(dataset, frames, lo, hi,
                                  model->cfg.conv_kernel(), model->cfg.input_dim);
      std::vector<int> labels(hi - lo);
      for (size_t i = lo; i < hi; i++)
        labels[i - lo] = dataset[frames[i].first].labels[frames[i].second];

      ForwardCache cache;
      const Mat logits = Forward(*model, rows, &cache);
      Mat dlogits;
      loss_sum += nnet::SoftmaxXent(logits, labels, &dlogits);
      steps++;

      nnet::Conv1d gconv = model->conv.ZeroLike();
      std::vector<Dense> gdense;
      for (const Dense &d : model->dense) gdense.push_back(d.ZeroLike());
      Dense gout = model->out.ZeroLike();
      Backward(*model, rows, cache, dlogits, &gconv, &gdense, &gout);

      if (cfg.weight_decay > 0.0) {
        gout.W += cfg.weight_decay * model->out.W;
        if (!cfg.freeze_trunk) {
          gconv.K += cfg.weight_decay * model->conv.K;
          for (size_t d = 0; d < gdense.size(); d++)
            gdense[d].W += cfg.weight_decay * model->dense[d].W;
        }
      }
      if (anchored) {
        gconv.K += cfg.anchor_decay * (model->conv.K - anchor_K);
        for (size_t d = 0; d < gdense.size(); d++)
          gdense[d].W += cfg.anchor_decay * (model->dense[d].W - anchor_W[d]);
      }
      if (cfg.ortho_decay > 0.0 && cfg.freeze_head_rows_below > 0) {
        const Eigen::Index n_old = cfg.freeze_head_rows_below;
        const Eigen::Index n_new = model->out.W.rows() - n_old;
        if (n_new > 0) {
          const Mat Wold = model->out.W.topRows(n_old);
          const Mat Wnew = model->out.W.bottomRows(n_new);
          gout.W.bottomRows(n_new) +=
              cfg.ortho_decay * (Wnew * Wold.transpose()) * Wold;
        }
      }
      if (cfg.freeze_head_rows_below > 0) {
        gout.W.topRows(cfg.freeze_head_rows_below).setZero();
        gout.b.leftCols(cfg.freeze_head_rows_below).setZero();
      }

      std::vector<const Mat *> grads;
      std::vector<Mat *> grad_ptrs;
      if (cfg.freeze_trunk) {
        gout.Collect(grad_ptrs);
      } else {
        gconv.Collect(grad_ptrs);
        for (Dense &d : gdense) d.Collect(grad_ptrs);
        gout.Collect(grad_ptrs);
      }
      nnet::ClipGlobalNorm(grad_ptrs, cfg.clip_norm);
      grads.assign(grad_ptrs.begin(), grad_ptrs.end());
      nnet::AdamStep(params, grads, &adam, cfg.lr);
    }

    report.epoch_loss.push_back(loss_sum / steps);
    const double acc =
        PpgFrameAccuracy(*model, heldout.empty() ? dataset : heldout);
    report.epoch_heldout_accuracy.push_back(acc);
    report.epochs_run = epoch + 1;
    if (acc >= cfg.target_accuracy) break;
  }
  return report;
}

Ppg ExtractPpg(const PpgModel &model, const FeatureMatrix &features) {
  if (features.Dim() != model.cfg.input_dim)
    throw ShapeMismatch("ExtractPpg: feature dim " +
                        std::to_string(features.Dim()) + ", expected " +
                        std::to_string(model.cfg.input_dim));
  Ppg ppg;
  ppg.space_checksum = model.space.checksum();
  if (features.NumFrames() == 0) {
    ppg.matrix = Mat(0, static_cast<Eigen::Index>(model.space.size()));
    return ppg;
  }
  const Mat rows = nnet::Im2Col(features.data, model.cfg.conv_kernel());
  ppg.matrix = nnet::Softmax(Forward(model, rows, nullptr));
  ppg.Validate(&model.space);
  return ppg;
}

double PpgFrameAccuracy(const PpgModel &model,
                        const std::vector<PpgExample> &examples) {
  int64_t total = 0, correct = 0;
  for (const PpgExample &e : examples) {
    const Ppg ppg = ExtractPpg(model, e.features);
    for (Eigen::Index t = 0; t < ppg.matrix.rows(); t++) {
      Eigen::Index argmax;
      ppg.matrix.row(t).maxCoeff(&argmax);
      total++;
      correct += argmax == e.labels[t];
    }
  }
  PPGFACE_CHECK(total > 0, "PpgFrameAccuracy: no frames");
  return static_cast<double>(correct) / static_cast<double>(total);
}

PpgModel ExtendPpgModel(const PpgModel &model, const PhonemeSpace &extended,
                        uint64_t seed) {
  const size_t old_p = model.space.size();
  PPGFACE_CHECK(extended.size() > old_p,
                "ExtendPpgModel: extended space is not larger");
  for (size_t i = 0; i < old_p; i++) {
    const PhonemeUnit &u = model.space.units()[i];
    if (extended.IndexOf(u.language_id, u.symbol) != i)
      throw SpaceMismatch("ExtendPpgModel: extended space does not preserve "
                          "existing unit indices");
  }
  RngStream rng(seed);
  PpgModel m;
  m.cfg = model.cfg;
  m.space = extended;
  m.conv = model.conv;
  m.dense = model.dense;
  m.out = Dense::Create(model.out.W.cols(),
                        static_cast<Eigen::Index>(extended.size()),
                        Activation::kLinear, rng);
  m.out.W.topRows(static_cast<Eigen::Index>(old_p)) = model.out.W;
  m.out.b.leftCols(static_cast<Eigen::Index>(old_p)) = model.out.b;
  return m;
}

void SavePpgModel(const std::string &path, const PpgModel &model) {
  Checkpoint ck;
  ck.header["model"] = "ppg";
  ck.header["context"] = std::to_string(model.cfg.context);
  ck.header["conv_channels"] = std::to_string(model.cfg.conv_channels);
  ck.header["dense_layers"] = std::to_string(model.cfg.dense_layers);
  ck.header["dense_units"] = std::to_string(model.cfg.dense_units);
  ck.header["input_dim"] = std::to_string(model.cfg.input_dim);
  ck.header["space_checksum"] = std::to_string(model.space.checksum());
  ck.header["phoneme_space"] = model.space.Serialize();
  ck.tensors.emplace_back("conv.K", model.conv.K);
  ck.tensors.emplace_back("conv.b", model.conv.b);
  for (size_t i = 0; i < model.dense.size(); i++) {
    ck.tensors.emplace_back("dense" + std::to_string(i) + ".W", model.dense[i].W);
    ck.tensors.emplace_back("dense" + std::to_string(i) + ".b", model.dense[i].b);
  }
  ck.tensors.emplace_back("out.W", model.out.W);
  ck.tensors.emplace_back("out.b", model.out.b);
  WriteNnck(path, ck);
}

PpgModel LoadPpgModel(const std::string &path) {
  const Checkpoint ck = ReadNnck(path);
  if (ck.Header("model") != "ppg")
    throw DataError("LoadPpgModel: not a ppg checkpoint: " + path);
  PpgExtractorConfig cfg;
  cfg.context = std::stoi(ck.Header("context"));
  cfg.conv_channels = std::stoi(ck.Header("conv_channels"));
  cfg.dense_layers = std::stoi(ck.Header("dense_layers"));
  cfg.dense_units = std::stoi(ck.Header("dense_units"));
  cfg.input_dim = std::stoi(ck.Header("input_dim"));

  PhonemeSpace space = PhonemeSpace::Deserialize(ck.Header("phoneme_space"));
  if (std::to_string(space.checksum()) != ck.Header("space_checksum"))
    throw SpaceMismatch("LoadPpgModel: space checksum mismatch in " + path);

  PpgModel m = BuildPpgModel(cfg, space, /*seed=*/0);
  m.conv.K = ck.Tensor("conv.K");
  m.conv.b = ck.Tensor("conv.b");
  for (int i = 0; i < cfg.dense_layers; i++) {
    m.dense[i].W = ck.Tensor("dense" + std::to_string(i) + ".W");
    m.dense[i].b = ck.Tensor("dense" + std::to_string(i) + ".b");
  }
  m.out.W = ck.Tensor("out.W");
  m.out.b = ck.Tensor("out.b");
  return m;
}

}  // namespace ppgface
