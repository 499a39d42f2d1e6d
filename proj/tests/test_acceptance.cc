// tests/test_acceptance.cc

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

// End-to-end acceptance gate. Each criterion prints exactly one
// [PASS]/[FAIL] line; the process exits nonzero if any criterion fails.
//
// Heavy artifacts (corpus, trained checkpoints) are rebuilt from scratch
// on every run unless PPGFACE_ACCEPT_CACHE is set in the environment, in
// which case they are reused from ./acceptance_work across runs (a
// development convenience only).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ppgface/eval.h"
#include "ppgface/pipeline.h"

namespace ppgface {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool UseCache() { return std::getenv("PPGFACE_ACCEPT_CACHE") != nullptr; }

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  PPGFACE_CHECK(in.good(), "acceptance: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ----------------------------------------------------------------------
// Shared context: corpus + trained models, built lazily.

struct Ctx {
  const std::string work = "acceptance_work";
  const std::string corpus_dir = work + "/corpus";
  const std::string corpus2_dir = work + "/corpus_gamma";

  RunConfig cfg;  // acceptance run configuration
  CorpusManifest manifest;
  PhonemeSpace full, alpha;

  PpgModel ppg;
  PpgTrainReport ppg_report;
  double ppg_train_sec = 0.0;
  bool ppg_ready = false;

  FapModel fap, mfcc_fap, fap_noenergy;
  bool fap_ready = false, mfcc_ready = false, noenergy_ready = false;

  Ctx() {
    // Spec-default architectures; training lengths sized for a single
    // laptop core.
    cfg.fap_train.max_epochs = 6;
    cfg.noise_augment_copies = 1;
    cfg.ppg_train.target_accuracy = 0.97;
  }

  void EnsureCorpus() {
    if (!manifest.records.empty()) return;
    if (!UseCache()) fs::remove_all(corpus_dir);
    if (!fs::exists(corpus_dir + "/manifest.tsv")) {
      GenCorpus(cfg.corpus, corpus_dir, /*n_threads=*/1);
    }
    manifest = CorpusManifest::Load(corpus_dir + "/manifest.tsv");
    full = PhonemeSpace::Load(corpus_dir + "/phoneme_space.tsv");
    alpha = SubspaceForLanguages(full, {"alpha"});
  }

  void EnsurePpg() {
    if (ppg_ready) return;
    EnsureCorpus();
    const std::string ck = work + "/ppg.nnck", meta = work + "/ppg.meta";
    if (UseCache() && fs::exists(ck) && fs::exists(meta)) {
      ppg = LoadPpgModel(ck);
      std::ifstream in(meta);
      double acc;
      in >> ppg_report.epochs_run >> acc >> ppg_train_sec;
      ppg_report.epoch_heldout_accuracy.assign(ppg_report.epochs_run, acc);
    } else {
      const auto t0 = Clock::now();
      PpgModel model = BuildPpgModel(cfg.ppg, alpha, cfg.ppg_train.seed);
      const auto ds = BuildPpgDataset(manifest, corpus_dir, alpha, {"train"},
                                      cfg.noise_augment_copies,
                                      cfg.ppg_train.seed);
      ppg_report = TrainPpg(&model, ds, cfg.ppg_train);
      ppg_train_sec = SecondsSince(t0);
      ppg = std::move(model);
      SavePpgModel(ck, ppg);
      std::ofstream(meta) << ppg_report.epochs_run << " "
                          << ppg_report.epoch_heldout_accuracy.back() << " "
                          << ppg_train_sec << "\n";
    }
    ppg_ready = true;
  }

  FapModel TrainOrLoadFap(const std::string &name, const PpgModel *front,
                          bool use_energy) {
    const std::string ck = work + "/" + name + ".nnck";
    if (UseCache() && fs::exists(ck)) return LoadFapModel(ck);
    RunConfig c = cfg;
    c.fap.use_energy = use_energy;
    FapModel model = TrainFapPipeline(c, front, manifest, corpus_dir);
    SaveFapModel(ck, model);
    return model;
  }

  void EnsureFap() {
    if (fap_ready) return;
    EnsurePpg();
    fap = TrainOrLoadFap("fap", &ppg, /*use_energy=*/true);
    fap_ready = true;
  }
  void EnsureMfccFap() {
    if (mfcc_ready) return;
    EnsureCorpus();
    mfcc_fap = TrainOrLoadFap("mfcc_fap", nullptr, /*use_energy=*/true);
    mfcc_ready = true;
  }
  void EnsureNoEnergyFap() {
    if (noenergy_ready) return;
    EnsurePpg();
    fap_noenergy = TrainOrLoadFap("fap_noenergy", &ppg, /*use_energy=*/false);
    noenergy_ready = true;
  }

  System PpgSystem() { return {"ppg-blstm", &ppg, &fap}; }
  System MfccSystem() { return {"mfcc-blstm", nullptr, &mfcc_fap}; }
};

// ----------------------------------------------------------------------
// Criterion 1: MLPG banded solve equals the dense normal-equation solve.

bool Criterion1(Ctx &, std::string &detail) {
  const auto t0 = Clock::now();
  RngStream rng(101);
  double max_diff = 0.0, max_rec = 0.0;
  for (int c = 0; c < 100; c++) {
    const int T = 1 + static_cast<int>(rng.UniformInt(12));
    const int D = 1 + static_cast<int>(rng.UniformInt(3));
    Mat means(T, 3 * D);
    for (int t = 0; t < T; t++)
      for (int d = 0; d < 3 * D; d++) means(t, d) = rng.Gaussian();
    GlobalVariance gv;
    gv.v = Vec(3 * D);
    for (int d = 0; d < 3 * D; d++) gv.v(d) = rng.Uniform(0.05, 2.0);

    const Mat banded = Mlpg(means, gv);
    const Mat dense = MlpgDense(means, gv);
    max_diff = std::max(max_diff, (banded - dense).cwiseAbs().maxCoeff());

    // Consistent input: windowed statics must be recovered exactly.
    Mat statics(T, D);
    for (int t = 0; t < T; t++)
      for (int d = 0; d < D; d++) statics(t, d) = rng.Gaussian();
    const Mat rec = Mlpg(ApplyMlpgWindows(statics), gv);
    max_rec = std::max(max_rec, (rec - statics).cwiseAbs().maxCoeff());
  }
  const double sec = SecondsSince(t0);
  std::ostringstream ss;
  ss << "banded-vs-dense " << max_diff << ", recovery " << max_rec << ", "
     << sec << " s";
  detail = ss.str();
  return max_diff <= 1e-8 && max_rec <= 1e-6 && sec < 10.0;
}

// ----------------------------------------------------------------------
// Criterion 2: finite-difference gradient suite.

namespace gradsuite {

double CheckDense(uint64_t seed, Eigen::Index T, Eigen::Index I,
                  Eigen::Index O, nnet::Activation act) {
  RngStream rng(seed);
  nnet::Dense p = nnet::Dense::Create(I, O, act, rng);
  Mat x(T, I), target(T, O);
  for (Eigen::Index i = 0; i < x.size(); i++) x.data()[i] = rng.Gaussian();
  for (Eigen::Index i = 0; i < target.size(); i++)
    target.data()[i] = rng.Gaussian();

  const auto loss = [&]() {
    Mat d;
    return nnet::MseLoss(DenseForward(p, x), target, &d);
  };
  nnet::DenseCache cache;
  Mat dpred;
  nnet::MseLoss(DenseForward(p, x, &cache), target, &dpred);
  nnet::Dense g = p.ZeroLike();
  DenseBackward(p, cache, dpred, &g);
  std::vector<Mat *> params;
  p.Collect(params);
  return nnet::GradCheck(loss, params, {g.W, g.b});
}

double CheckConv(uint64_t seed, Eigen::Index T, int C_in, int C_out, int k) {
  RngStream rng(seed);
  nnet::Conv1d p = nnet::Conv1d::Create(C_in, C_out, k, rng);
  Mat x(T, C_in), target(T, C_out);
  for (Eigen::Index i = 0; i < x.size(); i++) x.data()[i] = rng.Gaussian();
  for (Eigen::Index i = 0; i < target.size(); i++)
    target.data()[i] = rng.Gaussian();

  const auto loss = [&]() {
    Mat d;
    return nnet::MseLoss(Conv1dForward(p, x), target, &d);
  };
  nnet::Conv1dCache cache;
  Mat dpred;
  nnet::MseLoss(Conv1dForward(p, x, &cache), target, &dpred);
  nnet::Conv1d g = p.ZeroLike();
  Conv1dBackward(p, cache, dpred, &g);
  std::vector<Mat *> params;
  p.Collect(params);
  return nnet::GradCheck(loss, params, {g.K, g.b});
}

double CheckLstm(uint64_t seed, Eigen::Index T, Eigen::Index I,
                 Eigen::Index H, bool bidirectional) {
  RngStream rng(seed);
  const Eigen::Index O = bidirectional ? 2 * H : H;
  Mat x(T, I), target(T, O);
  for (Eigen::Index i = 0; i < x.size(); i++) x.data()[i] = rng.Gaussian();
  for (Eigen::Index i = 0; i < target.size(); i++)
    target.data()[i] = rng.Gaussian();
  const uint64_t mask_seed = rng.NextU64();

  if (bidirectional) {
    nnet::Blstm p = nnet::Blstm::Create(I, H, 0.1, 0.1, rng);
    // The mask stream is replayed from a fixed seed on every forward, so
    // the zoneout draws are frozen across finite-difference evaluations.
    const auto fwd = [&](nnet::BlstmCache *cache) {
      RngStream mask(mask_seed);
      return BlstmForward(p, x, /*training=*/true, &mask, cache);
    };
    const auto loss = [&]() {
      Mat d;
      return nnet::MseLoss(fwd(nullptr), target, &d);
    };
    nnet::BlstmCache cache;
    Mat dpred;
    nnet::MseLoss(fwd(&cache), target, &dpred);
    nnet::Blstm g = p.ZeroLike();
    BlstmBackward(p, cache, dpred, &g);
    std::vector<Mat *> params, grads;
    p.Collect(params);
    g.Collect(grads);
    std::vector<Mat> analytic;
    for (Mat *m : grads) analytic.push_back(*m);
    return nnet::GradCheck(loss, params, analytic);
  }

  nnet::LstmCell p = nnet::LstmCell::Create(I, H, 0.1, 0.1, rng);
  const auto fwd = [&](nnet::LstmSeqCache *cache) {
    RngStream mask(mask_seed);
    return LstmForward(p, x, /*training=*/true, &mask, cache);
  };
  const auto loss = [&]() {
    Mat d;
    return nnet::MseLoss(fwd(nullptr), target, &d);
  };
  nnet::LstmSeqCache cache;
  Mat dpred;
  nnet::MseLoss(fwd(&cache), target, &dpred);
  nnet::LstmCell g = p.ZeroLike();
  LstmBackward(p, cache, dpred, &g);
  std::vector<Mat *> params;
  p.Collect(params);
  return nnet::GradCheck(loss, params, {g.W_x, g.W_h, g.b});
}

}  // namespace gradsuite

bool Criterion2(Ctx &, std::string &detail) {
  const auto t0 = Clock::now();
  double worst_ff = 0.0, worst_rec = 0.0;
  int n = 0;

  using nnet::Activation;
  const Activation acts[] = {Activation::kLinear, Activation::kTanh,
                             Activation::kRelu};
  for (int i = 0; i < 6; i++) {
    worst_ff = std::max(
        worst_ff, gradsuite::CheckDense(200 + i, 3 + i, 2 + i, 4 - i % 3,
                                        acts[i % 3]));
    n++;
  }
  for (int i = 0; i < 6; i++) {
    worst_ff = std::max(
        worst_ff, gradsuite::CheckConv(300 + i, 4 + i, 2 + i % 3, 3, 1 + 2 * (i % 3)));
    n++;
  }
  for (int i = 0; i < 4; i++) {
    worst_rec = std::max(worst_rec,
                         gradsuite::CheckLstm(400 + i, 3 + i, 2 + i, 3 + i,
                                              /*bidirectional=*/false));
    n++;
  }
  for (int i = 0; i < 4; i++) {
    worst_rec = std::max(worst_rec,
                         gradsuite::CheckLstm(500 + i, 2 + i, 2 + i, 2 + i,
                                              /*bidirectional=*/true));
    n++;
  }

  const double sec = SecondsSince(t0);
  std::ostringstream ss;
  ss << n << " configs, feedforward " << worst_ff << ", recurrent "
     << worst_rec << ", " << sec << " s";
  detail = ss.str();
  return n >= 20 && worst_ff <= 1e-6 && worst_rec <= 1e-4 && sec < 60.0;
}

// Frame accuracy over non-silence frames. Silence is deliberately
// ambiguous phone-like babble (it is handled by the energy feature, not
// the acoustic front end), so phoneme-classification accuracy is
// measured over phoneme frames, mirroring the corpus separability
// oracle which excludes sil.
double NonSilAccuracy(const PpgModel &model, const std::vector<PpgExample> &ds,
                      const PhonemeSpace &space) {
  std::vector<char> is_sil(space.size(), 0);
  for (size_t i = 0; i < space.size(); i++)
    is_sil[i] = space.units()[i].symbol == "sil";
  int64_t n = 0, ok = 0;
  for (const PpgExample &e : ds) {
    const Ppg p = ExtractPpg(model, e.features);
    for (Eigen::Index t = 0; t < p.matrix.rows(); t++) {
      if (is_sil[e.labels[t]]) continue;
      Eigen::Index arg;
      p.matrix.row(t).maxCoeff(&arg);
      n++;
      ok += arg == e.labels[t];
    }
  }
  PPGFACE_CHECK(n > 0, "acceptance: no non-sil frames");
  return static_cast<double>(ok) / static_cast<double>(n);
}

// ----------------------------------------------------------------------
// Criterion 3: PPG validity + corpus training accuracy.

bool Criterion3(Ctx &ctx, std::string &detail) {
  ctx.EnsureCorpus();

  // Row-stochastic extraction and the zero-weight uniform oracle on a
  // thin config (properties hold for any weights).
  PpgExtractorConfig small;
  small.context = 2;
  small.conv_channels = 8;
  small.dense_layers = 1;
  small.dense_units = 8;
  PpgModel tiny = BuildPpgModel(small, ctx.alpha, 7);
  const Waveform wave =
      ReadWav(ctx.corpus_dir + "/" + ctx.manifest.records[0].audio_path);
  const FeatureMatrix dyn = DynamicFeatures(LogMel(wave, FrameConfig()));
  Ppg p = ExtractPpg(tiny, dyn);
  bool stochastic =
      (p.matrix.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-5 &&
      p.matrix.minCoeff() >= 0.0;

  std::vector<Mat *> params;
  tiny.Collect(params);
  for (Mat *m : params) m->setZero();
  const Ppg u = ExtractPpg(tiny, dyn);
  const double uniform = 1.0 / static_cast<double>(ctx.alpha.size());
  const bool exact_uniform = (u.matrix.array() == uniform).all();

  ctx.EnsurePpg();
  // The asserted held-out frame accuracy is measured on clean held-out
  // utterances ("normal" split: training speakers/language, unseen
  // utterances). The internal estimate mixes in the noise-augmented
  // copies (down to -15 dB SNR) and is reported for context only.
  const auto clean_ds =
      BuildPpgDataset(ctx.manifest, ctx.corpus_dir, ctx.alpha, {"normal"}, 0, 12);
  const double acc = NonSilAccuracy(ctx.ppg, clean_ds, ctx.alpha);
  const double mixed = ctx.ppg_report.epoch_heldout_accuracy.back();

  std::ostringstream ss;
  ss << "row-stochastic " << (stochastic ? "yes" : "NO") << ", zero-model "
     << (exact_uniform ? "uniform" : "NOT uniform") << ", held-out acc "
     << acc << " (noisy-augmented heldout " << mixed << ") in "
     << ctx.ppg_report.epochs_run << " epochs, " << ctx.ppg_train_sec << " s";
  detail = ss.str();
  return stochastic && exact_uniform && acc >= 0.95 &&
         ctx.ppg_report.epochs_run <= 30 && ctx.ppg_train_sec < 900.0;
}

// ----------------------------------------------------------------------
// Criterion 4: PPG beats MFCC on unseen speaker and unseen language.

bool Criterion4(Ctx &ctx, std::string &detail) {
  ctx.EnsureFap();
  ctx.EnsureMfccFap();
  const std::vector<System> systems = {ctx.PpgSystem(), ctx.MfccSystem()};

  std::ostringstream ss;
  bool ok = true;
  for (const std::string split : {"unseen_speaker", "unseen_language",
                                  "normal"}) {
    const EvalReport r =
        RunSplitEval(systems, ctx.manifest, ctx.corpus_dir, split);
    ss << split << " ppg " << r.rows[0].mse << " vs mfcc " << r.rows[1].mse
       << " (n=" << r.rows[0].n << "); ";
    if (split != "normal")  // normal is recorded, not asserted
      ok = ok && r.rows[0].mse < r.rows[1].mse;
  }
  detail = ss.str();
  return ok;
}

// ----------------------------------------------------------------------
// Criterion 5: SNR sweep monotonicity + degradation slope.

bool Criterion5(Ctx &ctx, std::string &detail) {
  ctx.EnsureFap();
  ctx.EnsureMfccFap();
  const std::vector<System> systems = {ctx.PpgSystem(), ctx.MfccSystem()};
  const EvalReport r = RunSnrSweep(systems, ctx.manifest, ctx.corpus_dir,
                                   "normal", DefaultSnrGrid());
  // Rows: system-major, 9 SNR levels 25..-15 each.
  const auto mse_at = [&](int sys, int level) {
    return r.rows[sys * 9 + level].mse;
  };
  bool monotone = true;
  for (int sys = 0; sys < 2; sys++)
    for (int level = 1; level < 9; level++)
      // Non-decreasing as SNR falls, with 5% per-step noise tolerance.
      monotone = monotone &&
                 mse_at(sys, level) >= 0.95 * mse_at(sys, level - 1);

  const double d_ppg = mse_at(0, 3) - mse_at(0, 0);   // 25 dB -> 10 dB
  const double d_mfcc = mse_at(1, 3) - mse_at(1, 0);
  std::ostringstream ss;
  ss << "monotone " << (monotone ? "yes" : "NO") << ", 25->10 dB dMSE ppg "
     << d_ppg << " vs mfcc " << d_mfcc;
  detail = ss.str();
  return monotone && d_ppg < d_mfcc;
}

// ----------------------------------------------------------------------
// Criterion 6: silence closure A/B.

double SilenceClosureRate(Ctx &ctx, const FapModel &fap,
                          const std::string &split) {
  const System sys{"s", &ctx.ppg, &fap};
  int64_t sil = 0, closed = 0;
  for (const ManifestRecord &rec : ctx.manifest.Split(split)) {
    const Waveform wave = ReadWav(ctx.corpus_dir + "/" + rec.audio_path);
    const auto spans =
        LoadAlignment(ctx.corpus_dir + "/" + rec.alignment_path);
    const Mat statics =
        RunPipeline(sys, wave, EmotionFromName(rec.emotion), SmoothMode::kMlpg);
    for (const AlignmentSpan &s : spans) {
      if (s.symbol != "sil") continue;
      for (int t = s.start_frame; t < s.end_frame; t++) {
        sil++;
        const double worst =
            statics.row(t)
                .segment(kMouthDimLo, kMouthDimHi - kMouthDimLo + 1)
                .cwiseAbs()
                .maxCoeff();
        closed += worst <= kClosedMouthTolerance;
      }
    }
  }
  PPGFACE_CHECK(sil > 0, "acceptance: no silent frames in split " + split);
  return static_cast<double>(closed) / static_cast<double>(sil);
}

bool Criterion6(Ctx &ctx, std::string &detail) {
  ctx.EnsureFap();
  ctx.EnsureNoEnergyFap();
  const double with_energy = SilenceClosureRate(ctx, ctx.fap, "normal");
  const double without = SilenceClosureRate(ctx, ctx.fap_noenergy, "normal");
  std::ostringstream ss;
  ss << "closure with energy " << with_energy << ", without " << without;
  detail = ss.str();
  return with_energy >= 0.95 && without < with_energy;
}

// ----------------------------------------------------------------------
// Criterion 7: phoneme-space extension + fine-tune.

bool Criterion7(Ctx &ctx, std::string &detail) {
  ctx.EnsurePpg();
  ctx.EnsureFap();

  // Second corpus introducing a third language, gamma, alongside alpha.
  if (!UseCache()) fs::remove_all(ctx.corpus2_dir);
  if (!fs::exists(ctx.corpus2_dir + "/manifest.tsv")) {
    CorpusConfig c2 = ctx.cfg.corpus;
    c2.languages = {{"alpha", 8, ""}, {"gamma", 8, ""}};
    c2.master_seed = ctx.cfg.corpus.master_seed + 1;
    GenCorpus(c2, ctx.corpus2_dir, 1);
  }
  const CorpusManifest m2 =
      CorpusManifest::Load(ctx.corpus2_dir + "/manifest.tsv");
  const PhonemeSpace full2 =
      PhonemeSpace::Load(ctx.corpus2_dir + "/phoneme_space.tsv");

  // Extend the trained model's space with gamma and fine-tune the new
  // softmax rows only, on gamma data only.
  Inventory gamma_inv{"gamma", {}};
  for (const PhonemeUnit &u : full2.units())
    if (u.language_id == "gamma") gamma_inv.second.push_back(u.symbol);
  const PhonemeSpace extended = ctx.ppg.space.Extend(gamma_inv);

  PpgModel ext = ExtendPpgModel(ctx.ppg, extended, 77);
  // Gamma utterances come from the second corpus's train speakers
  // ("unseen_language" split holds that corpus's non-alpha material).
  auto gamma_ds = BuildPpgDataset(m2, ctx.corpus2_dir, extended,
                                  {"unseen_language"}, 0, 11);
  // Old head rows stay frozen; the trunk adapts to the new language's
  // acoustic territory under an anchor to its pre-fine-tune weights,
  // which bounds feature drift on the old language (nothing in a
  // gamma-only fine-tune set measures that drift).
  PpgTrainConfig ft = ctx.cfg.ppg_train;
  ft.freeze_head_rows_below = static_cast<int>(ctx.ppg.space.size());
  ft.lr = 1e-4;
  ft.max_epochs = 15;
  ft.target_accuracy = 0.95;
  ft.anchor_decay = 0.3;
  const PpgTrainReport ft_report = TrainPpg(&ext, gamma_ds, ft);

  // Old-language accuracy before vs after, on the original corpus's
  // held-out alpha material ("normal" split).
  const auto alpha_ds = BuildPpgDataset(ctx.manifest, ctx.corpus_dir,
                                        ctx.ppg.space, {"normal"}, 0, 12);
  const double acc_before = NonSilAccuracy(ctx.ppg, alpha_ds, ctx.ppg.space);
  const double acc_after = NonSilAccuracy(ext, alpha_ds, extended);

  // The old-space FAP model must refuse extended-space PPGs.
  bool guarded = false;
  try {
    const Waveform wave =
        ReadWav(ctx.corpus_dir + "/" + ctx.manifest.records[0].audio_path);
    const Ppg pe =
        ExtractPpg(ext, DynamicFeatures(LogMel(wave, FrameConfig())));
    AssembleInput(ctx.fap, pe, FrameEnergy(wave, FrameConfig()),
                  Emotion::kNeutral);
  } catch (const SpaceMismatch &) {
    guarded = true;
  }

  std::ostringstream ss;
  ss << "alpha acc " << acc_before << " -> " << acc_after << ", gamma acc "
     << ft_report.epoch_heldout_accuracy.back() << ", checksum guard "
     << (guarded ? "yes" : "NO");
  detail = ss.str();
  // The gamma floor keeps the check meaningful: a fine-tune that learns
  // nothing would preserve alpha trivially.
  return acc_before - acc_after < 0.05 &&
         ft_report.epoch_heldout_accuracy.back() >= 0.85 && guarded;
}

// ----------------------------------------------------------------------
// Criterion 8: determinism.

bool Criterion8(Ctx &ctx, std::string &detail) {
  ctx.EnsureFap();
  bool ok = true;
  std::ostringstream ss;

  // Corpus generation, threads 1 vs 3.
  {
    CorpusConfig small = ctx.cfg.corpus;
    small.n_train_speakers = 2;
    small.n_test_speakers = 1;
    small.utts_per_speaker = 4;
    const std::string d1 = ctx.work + "/det1", d3 = ctx.work + "/det3";
    fs::remove_all(d1);
    fs::remove_all(d3);
    const CorpusManifest m1 = GenCorpus(small, d1, 1);
    GenCorpus(small, d3, 3);
    bool same = ReadFileBytes(d1 + "/manifest.tsv") ==
                ReadFileBytes(d3 + "/manifest.tsv");
    for (const ManifestRecord &r : m1.records)
      same = same &&
             ReadFileBytes(d1 + "/" + r.audio_path) ==
                 ReadFileBytes(d3 + "/" + r.audio_path) &&
             ReadFileBytes(d1 + "/" + r.fap_path) ==
                 ReadFileBytes(d3 + "/" + r.fap_path);
    ss << "corpus threads " << (same ? "ok" : "DIFFER");
    ok = ok && same;

    // Training reproducibility on the same small corpus.
    RunConfig rc;
    rc.ppg.context = 2;
    rc.ppg.conv_channels = 8;
    rc.ppg.dense_layers = 1;
    rc.ppg.dense_units = 8;
    rc.ppg_train.max_epochs = 1;
    rc.fap.blstm_layers = 1;
    rc.fap.blstm_units = 8;
    rc.fap.dense_layers = 1;
    rc.fap.dense_units = 8;
    rc.fap_train.max_epochs = 1;
    rc.noise_augment_copies = 0;
    const PpgModel pa = TrainPpgPipeline(rc, m1, d1, {"alpha"});
    const PpgModel pb = TrainPpgPipeline(rc, m1, d1, {"alpha"});
    const FapModel fa = TrainFapPipeline(rc, &pa, m1, d1);
    const FapModel fb = TrainFapPipeline(rc, &pb, m1, d1);
    SavePpgModel(ctx.work + "/det_p1.nnck", pa);
    SavePpgModel(ctx.work + "/det_p2.nnck", pb);
    SaveFapModel(ctx.work + "/det_f1.nnck", fa);
    SaveFapModel(ctx.work + "/det_f2.nnck", fb);
    const bool train_same =
        ReadFileBytes(ctx.work + "/det_p1.nnck") ==
            ReadFileBytes(ctx.work + "/det_p2.nnck") &&
        ReadFileBytes(ctx.work + "/det_f1.nnck") ==
            ReadFileBytes(ctx.work + "/det_f2.nnck");
    ss << ", training " << (train_same ? "ok" : "DIFFER");
    ok = ok && train_same;
    fs::remove_all(d1);
    fs::remove_all(d3);
  }

  // Inference on the full models.
  {
    const Waveform wave =
        ReadWav(ctx.corpus_dir + "/" + ctx.manifest.records[0].audio_path);
    const System sys = ctx.PpgSystem();
    const Mat a = RunPipeline(sys, wave, Emotion::kAngry);
    const Mat b = RunPipeline(sys, wave, Emotion::kAngry);
    const bool infer_same = a.rows() == b.rows() && a.cwiseEqual(b).all();
    ss << ", inference " << (infer_same ? "ok" : "DIFFER");
    ok = ok && infer_same;
  }

  // Evaluation, threads 1 vs 2 and repeat runs.
  {
    EvalOptions o1;
    o1.n_samples = 6;
    EvalOptions o2 = o1;
    o2.n_threads = 2;
    const std::vector<System> systems = {ctx.PpgSystem()};
    const EvalReport r1 =
        RunSplitEval(systems, ctx.manifest, ctx.corpus_dir, "normal", o1);
    const EvalReport r2 =
        RunSplitEval(systems, ctx.manifest, ctx.corpus_dir, "normal", o2);
    const EvalReport s1 = RunSnrSweep(systems, ctx.manifest, ctx.corpus_dir,
                                      "normal", {25.0, -15.0}, o1);
    const EvalReport s2 = RunSnrSweep(systems, ctx.manifest, ctx.corpus_dir,
                                      "normal", {25.0, -15.0}, o2);
    const auto same_rows = [](const EvalReport &x, const EvalReport &y) {
      if (x.rows.size() != y.rows.size()) return false;
      for (size_t i = 0; i < x.rows.size(); i++)
        if (x.rows[i].mse != y.rows[i].mse ||
            x.rows[i].pearson_mean != y.rows[i].pearson_mean)
          return false;
      return true;
    };
    const bool eval_same = same_rows(r1, r2) && same_rows(s1, s2);
    ss << ", eval threads " << (eval_same ? "ok" : "DIFFER");
    ok = ok && eval_same;
  }

  detail = ss.str();
  return ok;
}

// ----------------------------------------------------------------------
// Criterion 9: emotion conditioning.

bool Criterion9(Ctx &ctx, std::string &detail) {
  ctx.EnsureFap();
  const System sys = ctx.PpgSystem();

  double mod = 0.0, rest = 0.0;
  int n_utts = 0;
  for (const ManifestRecord &rec : ctx.manifest.Split("normal")) {
    const Waveform wave = ReadWav(ctx.corpus_dir + "/" + rec.audio_path);
    const Mat happy = RunPipeline(sys, wave, Emotion::kHappy);
    const Mat sad = RunPipeline(sys, wave, Emotion::kSad);
    const Mat diff = (happy - sad).cwiseAbs2();
    for (int d = 0; d < kFapDim; d++) {
      if (d >= kEmotionDimLo && d <= kEmotionDimHi)
        mod += diff.col(d).mean();
      else
        rest += diff.col(d).mean();
    }
    if (++n_utts >= 6) break;
  }
  const int n_mod = kEmotionDimHi - kEmotionDimLo + 1;
  const int n_rest = kFapDim - n_mod;
  const double ratio = (mod / n_mod) / std::max(rest / n_rest, 1e-12);
  std::ostringstream ss;
  ss << "modulated/unmodulated power ratio " << ratio << " over " << n_utts
     << " utterances";
  detail = ss.str();
  return ratio > 10.0;
}

// ----------------------------------------------------------------------

int Run() {
  Ctx ctx;
  fs::create_directories(ctx.work);

  struct Criterion {
    const char *name;
    std::function<bool(Ctx &, std::string &)> fn;
  };
  const Criterion criteria[] = {
      {"1. MLPG banded solve matches the dense oracle", Criterion1},
      {"2. finite-difference gradient suite", Criterion2},
      {"3. PPG validity and corpus training accuracy", Criterion3},
      {"4. PPG beats MFCC on unseen speaker/language", Criterion4},
      {"5. SNR sweep monotone; PPG degrades slower 25->10 dB", Criterion5},
      {"6. silence closure with energy; ablation scores lower", Criterion6},
      {"7. phoneme-space extension keeps old-language accuracy", Criterion7},
      {"8. bitwise determinism (corpus/train/infer/eval)", Criterion8},
      {"9. emotion conditioning moves only modulated dims", Criterion9},
  };

  int failures = 0;
  for (const Criterion &c : criteria) {
    std::string detail;
    bool pass = false;
    const auto t0 = Clock::now();
    try {
      pass = c.fn(ctx, detail);
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.name << " — " << detail
              << " (" << SecondsSince(t0) << " s)" << std::endl;
    failures += !pass;
  }
  if (!UseCache()) fs::remove_all(ctx.work);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace ppgface

int main() { return ppgface::Run(); }
