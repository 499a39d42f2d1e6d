// tests/test_fap_model.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ppgface/fap_model.h"
#include "ppgface/rng.h"

using namespace ppgface;

namespace {

FapPredictorConfig TinyConfig(int feature_dim = 6, bool use_energy = true) {
  FapPredictorConfig cfg;
  cfg.blstm_layers = 1;
  cfg.blstm_units = 16;
  cfg.dense_layers = 1;
  cfg.dense_units = 16;
  cfg.feature_dim = feature_dim;
  cfg.use_energy = use_energy;
  return cfg;
}

FeatureMatrix EnergyOf(const Mat &col) {
  FeatureMatrix e;
  e.data = col;
  e.kind = FeatureKind::kEnergy;
  return e;
}

// Smooth multi-sine static trajectory, D = kFapDim.
Mat SmoothStatics(int T, uint64_t seed) {
  RngStream rng(seed);
  Mat s(T, kFapDim);
  for (int d = 0; d < kFapDim; d++) {
    const double f = rng.Uniform(0.15, 0.6), ph = rng.Uniform(0.0, 6.28);
    const double a = rng.Uniform(0.3, 1.0);
    for (int t = 0; t < T; t++) s(t, d) = a * std::sin(f * t + ph);
  }
  return s;
}

std::string ReadBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fap_model: parameter count matches the closed form") {
  FapPredictorConfig cfg;
  cfg.feature_dim = 218;  // input_dim = 218 + 1 + 4 = 223
  CHECK(cfg.input_dim() == 223);
  const FapModel m = BuildFapModel(cfg, 1);

  auto lstm_dir = [](int64_t in, int64_t h) { return 4 * h * in + 4 * h * h + 4 * h; };
  int64_t want = 2 * lstm_dir(223, 128) + 2 * 2 * lstm_dir(256, 128);
  want += 96LL * 256 + 96 + 96LL * 96 + 96;  // tanh dense layers
  want += 96LL * 96 + 96;                    // linear output
  CHECK(m.NumParams() == want);
}

TEST_CASE("fap_model: assemble_input layout") {
  FapModel m = BuildFapModel(TinyConfig(6), 2);
  m.energy_mean = 3.0;
  m.energy_std = 2.0;
  const Mat feats = Mat::Random(5, 6);
  const FeatureMatrix energy = EnergyOf(Mat::Constant(5, 1, 7.0));

  const Mat x = AssembleInput(m, feats, energy, Emotion::kNeutral);
  CHECK(x.rows() == 5);
  CHECK(x.cols() == 11);  // 6 + 1 + 4
  CHECK(x.leftCols(6) == feats);
  for (int t = 0; t < 5; t++) {
    CHECK(x(t, 6) == doctest::Approx(2.0));  // (7 - 3) / 2
    CHECK(x(t, 7) == 1.0);                   // neutral one-hot
    CHECK(x(t, 8) == 0.0);
    CHECK(x(t, 9) == 0.0);
    CHECK(x(t, 10) == 0.0);
  }

  SUBCASE("sad one-hot") {
    const Mat xs = AssembleInput(m, feats, energy, Emotion::kSad);
    CHECK(xs(0, 10) == 1.0);
    CHECK(xs(0, 7) == 0.0);
  }
  SUBCASE("no-energy ablation drops the column") {
    FapModel m2 = BuildFapModel(TinyConfig(6, /*use_energy=*/false), 2);
    const Mat x2 = AssembleInput(m2, feats, energy, Emotion::kAngry);
    CHECK(x2.cols() == 10);
    CHECK(x2(0, 7) == 1.0);  // angry at features+1
  }
  SUBCASE("frame-count mismatch") {
    const FeatureMatrix bad = EnergyOf(Mat::Zero(4, 1));
    CHECK_THROWS_AS(AssembleInput(m, feats, bad, Emotion::kNeutral),
                    LengthMismatch);
  }
  SUBCASE("ppg checksum guard") {
    m.space_checksum = 42;
    Ppg ppg;
    ppg.matrix = Mat::Constant(5, 6, 1.0 / 6.0);
    ppg.space_checksum = 43;
    CHECK_THROWS_AS(AssembleInput(m, ppg, energy, Emotion::kNeutral),
                    SpaceMismatch);
    ppg.space_checksum = 42;
    CHECK(AssembleInput(m, ppg, energy, Emotion::kNeutral).rows() == 5);
  }
}

TEST_CASE("fap_model: energy statistics oracle") {
  FapModel m = BuildFapModel(TinyConfig(), 3);
  std::vector<FeatureMatrix> es;
  es.push_back(EnergyOf((Mat(3, 1) << 1.0, 2.0, 3.0).finished()));
  es.push_back(EnergyOf((Mat(1, 1) << 6.0).finished()));
  SetEnergyStats(&m, es);
  CHECK(m.energy_mean == doctest::Approx(3.0));
  // Population variance: ((1-3)^2 + (2-3)^2 + (3-3)^2 + (6-3)^2) / 4.
  CHECK(m.energy_std == doctest::Approx(std::sqrt(3.5)));
}

TEST_CASE("fap_model: inference shape and determinism") {
  const FapModel m = BuildFapModel(TinyConfig(), 5);
  CHECK(PredictFapMeans(m, Mat(0, 11)).rows() == 0);
  CHECK(PredictFapMeans(m, Mat(0, 11)).cols() == 96);

  const Mat x = Mat::Random(12, 11);
  const Mat a = PredictFapMeans(m, x);
  const Mat b = PredictFapMeans(m, x);
  CHECK(a.rows() == 12);
  CHECK(a.cols() == 96);
  CHECK(a.allFinite());
  CHECK(a == b);  // zoneout expectation blend, no sampling

  CHECK_THROWS_AS(PredictFapMeans(m, Mat::Zero(3, 10)), ShapeMismatch);
}

TEST_CASE("fap_model: single-utterance overfit reaches MSE < 1e-3") {
  FapModel m = BuildFapModel(TinyConfig(), 7);
  RngStream rng(71);
  FapExample ex;
  ex.input = Mat::Zero(30, 11);
  for (int t = 0; t < 30; t++)
    for (int d = 0; d < 7; d++) ex.input(t, d) = rng.Gaussian();
  ex.input.rightCols(4).col(0).setOnes();
  ex.target = ApplyMlpgWindows(SmoothStatics(30, 72));

  FapTrainConfig tc;
  tc.max_epochs = 500;  // one example -> 500 steps
  tc.lr = 5e-3;
  const FapTrainReport rep = TrainFap(&m, {ex}, tc);
  double min_loss = 1e9;
  for (double l : rep.epoch_loss) min_loss = std::min(min_loss, l);
  CHECK(min_loss < 1e-3);
}

TEST_CASE("fap_model: training is bitwise deterministic in the seed") {
  std::vector<FapExample> ds;
  for (int i = 0; i < 4; i++) {
    FapExample ex;
    ex.input = Mat::Random(15, 11);
    ex.target = ApplyMlpgWindows(SmoothStatics(15, 100 + i));
    ds.push_back(std::move(ex));
  }
  FapTrainConfig tc;
  tc.max_epochs = 3;

  FapModel a = BuildFapModel(TinyConfig(), 9);
  FapModel b = BuildFapModel(TinyConfig(), 9);
  TrainFap(&a, ds, tc);
  TrainFap(&b, ds, tc);

  const std::string p1 = "test_fap_ck1.nnck", p2 = "test_fap_ck2.nnck";
  SaveFapModel(p1, a);
  SaveFapModel(p2, b);
  CHECK(ReadBytes(p1) == ReadBytes(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("fap_model: global variance is computed from training targets") {
  std::vector<FapExample> ds;
  std::vector<Mat> targets;
  for (int i = 0; i < 3; i++) {
    FapExample ex;
    ex.input = Mat::Random(10, 11);
    ex.target = ApplyMlpgWindows(SmoothStatics(10, 200 + i));
    targets.push_back(ex.target);
    ds.push_back(std::move(ex));
  }
  FapModel m = BuildFapModel(TinyConfig(), 11);
  FapTrainConfig tc;
  tc.max_epochs = 1;
  TrainFap(&m, ds, tc);
  const GlobalVariance want = ComputeGlobalVariance(targets);
  CHECK((m.gv.v - want.v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fap_model: emotion conditioning moves only the modulated dims") {
  // Targets: a shared base trajectory plus a static offset on dims 20-31
  // that depends on the emotion label. The network must route the one-hot
  // columns to exactly those target dims.
  RngStream rng(300);
  const Mat base = SmoothStatics(20, 301);
  std::vector<FapExample> ds;
  for (int rep = 0; rep < 3; rep++) {
    for (Emotion em : kAllEmotions) {
      Mat statics = base;
      const double off = em == Emotion::kHappy   ? 1.0
                         : em == Emotion::kSad   ? -1.0
                         : em == Emotion::kAngry ? 0.5
                                                 : 0.0;
      for (int d = kEmotionDimLo; d <= kEmotionDimHi; d++)
        statics.col(d).array() += off;
      FapExample ex;
      ex.input = Mat::Zero(20, 11);
      for (int t = 0; t < 20; t++)
        for (int d = 0; d < 7; d++) ex.input(t, d) = 0.1 * rng.Gaussian();
      ex.input.rightCols(4).rowwise() = EmotionOneHot(em);
      ex.target = ApplyMlpgWindows(statics);
      ex.emotion = em;
      ds.push_back(std::move(ex));
    }
  }
  FapModel m = BuildFapModel(TinyConfig(), 13);
  FapTrainConfig tc;
  tc.max_epochs = 120;
  tc.lr = 5e-3;
  TrainFap(&m, ds, tc);

  Mat x = ds[0].input;
  x.rightCols(4).rowwise() = EmotionOneHot(Emotion::kHappy);
  const Mat happy = PredictFapMeans(m, x);
  x.rightCols(4).rowwise() = EmotionOneHot(Emotion::kSad);
  const Mat sad = PredictFapMeans(m, x);

  const Mat diff = (happy - sad).cwiseAbs2();
  double mod = 0.0, rest = 0.0;
  int n_mod = 0, n_rest = 0;
  for (int d = 0; d < kFapDim; d++) {  // static block only
    if (d >= kEmotionDimLo && d <= kEmotionDimHi) {
      mod += diff.col(d).mean();
      n_mod++;
    } else {
      rest += diff.col(d).mean();
      n_rest++;
    }
  }
  CHECK(mod / n_mod > 10.0 * (rest / n_rest));
}

TEST_CASE("fap_model: beats the mean-predictor baseline on held-out data") {
  // Learnable mapping: input carries the static target directly in its
  // feature block; held-out examples (every 10th) gauge generalization.
  std::vector<FapExample> ds;
  for (int i = 0; i < 20; i++) {
    const Mat statics = SmoothStatics(25, 400 + i);
    FapExample ex;
    ex.input = Mat::Zero(25, 37);  // 32 features + energy + 4 one-hot
    ex.input.leftCols(kFapDim) = statics;
    ex.input.rightCols(4).col(0).setOnes();
    ex.target = ApplyMlpgWindows(statics);
    ds.push_back(std::move(ex));
  }
  FapPredictorConfig cfg = TinyConfig(kFapDim);
  cfg.blstm_units = 32;
  cfg.dense_units = 48;
  FapModel m = BuildFapModel(cfg, 15);
  FapTrainConfig tc;
  tc.max_epochs = 200;
  tc.lr = 3e-3;
  const FapTrainReport rep = TrainFap(&m, ds, tc);

  // Mean predictor over the training targets.
  Mat mean_row = Mat::Zero(1, 96);
  int64_t frames = 0;
  for (size_t i = 0; i < ds.size(); i++) {
    if (i % 10 == 9) continue;
    mean_row += ds[i].target.colwise().sum();
    frames += ds[i].target.rows();
  }
  mean_row /= static_cast<double>(frames);

  double model_mse = 0.0, mean_mse = 0.0;
  int64_t n = 0;
  for (size_t i = 9; i < ds.size(); i += 10) {
    const Mat pred_static = Mlpg(PredictFapMeans(m, ds[i].input), m.gv);
    const Mat base_static =
        Mlpg(Mat(mean_row.replicate(ds[i].target.rows(), 1)), m.gv);
    const Mat truth = Mlpg(ds[i].target, m.gv);
    model_mse += (pred_static - truth).array().square().sum();
    mean_mse += (base_static - truth).array().square().sum();
    n += truth.size();
  }
  model_mse /= n;
  mean_mse /= n;
  CHECK(model_mse <= 0.5 * mean_mse);
  CHECK(rep.epoch_heldout_mse.back() < rep.epoch_heldout_mse.front());
}

TEST_CASE("fap_model: checkpoint round trip") {
  FapModel m = BuildFapModel(TinyConfig(), 17);
  m.space_checksum = 0xdeadbeef;
  m.energy_mean = -4.2;
  m.energy_std = 1.7;
  m.gv.v = Vec::LinSpaced(96, 0.5, 2.0);

  const std::string p1 = "test_fap_rt1.nnck", p2 = "test_fap_rt2.nnck";
  SaveFapModel(p1, m);
  const FapModel loaded = LoadFapModel(p1);
  SaveFapModel(p2, loaded);
  CHECK(ReadBytes(p1) == ReadBytes(p2));

  CHECK(loaded.space_checksum == m.space_checksum);
  CHECK(loaded.energy_mean == m.energy_mean);
  CHECK(loaded.energy_std == m.energy_std);
  CHECK(loaded.cfg.feature_dim == 6);
  CHECK(loaded.cfg.use_energy);

  const Mat x = Mat::Random(8, 11);
  // Tensors are stored as f32.
  CHECK((PredictFapMeans(m, x) - PredictFapMeans(loaded, x))
            .cwiseAbs()
            .maxCoeff() < 1e-4);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
