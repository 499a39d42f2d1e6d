// src/eval.cc

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

#include "ppgface/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ppgface/fmtx.h"
#include "ppgface/noise.h"
#include "ppgface/parallel.h"

namespace ppgface {

double Mse(const Mat &pred, const Mat &gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw ShapeMismatch("Mse: " + std::to_string(pred.rows()) + "x" +
                        std::to_string(pred.cols()) + " vs " +
                        std::to_string(gt.rows()) + "x" +
                        std::to_string(gt.cols()));
  PPGFACE_CHECK(pred.size() > 0, "Mse: empty matrices");
  return (pred - gt).array().square().sum() / static_cast<double>(pred.size());
}

Vec PearsonPerDim(const Mat &pred, const Mat &gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols())
    throw ShapeMismatch("PearsonPerDim: shape mismatch");
  PPGFACE_CHECK(pred.rows() >= 2, "PearsonPerDim: need at least 2 frames");
  const Eigen::Index D = pred.cols();
  Vec r = Vec::Zero(D);
  for (Eigen::Index d = 0; d < D; d++) {
    const double ma = pred.col(d).mean(), mb = gt.col(d).mean();
    const auto ca = pred.col(d).array() - ma;
    const auto cb = gt.col(d).array() - mb;
    const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
    if (denom > 0.0) r(d) = (ca * cb).sum() / denom;
  }
  return r;
}

FeatureMatrix MfccBaselineFeatures(const Waveform &wave,
                                   const FrameConfig &cfg) {
  const FeatureMatrix mel = LogMel(wave, cfg);
  const int M = cfg.n_mels;
  Mat dct(kNumCepstra, M);
  for (int k = 0; k < kNumCepstra; k++) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / M);
    for (int m = 0; m < M; m++)
      dct(k, m) = scale * std::cos(M_PI * k * (2 * m + 1) / (2.0 * M));
  }
  FeatureMatrix mfcc;
  mfcc.data = mel.data * dct.transpose();
  mfcc.frame_shift_ms = mel.frame_shift_ms;
  mfcc.kind = FeatureKind::kGeneric;
  return DynamicFeatures(mfcc);
}

Mat RunPipeline(const System &sys, const Waveform &wave, Emotion emotion,
                SmoothMode mode) {
  PPGFACE_CHECK(sys.fap != nullptr, "RunPipeline: system has no FAP model");
  const FrameConfig fcfg;
  const FeatureMatrix energy = FrameEnergy(wave, fcfg);

  Mat input;
  if (sys.ppg != nullptr) {
    const FeatureMatrix dyn = DynamicFeatures(LogMel(wave, fcfg));
    const Ppg ppg = ExtractPpg(*sys.ppg, dyn);
    input = AssembleInput(*sys.fap, ppg, energy, emotion);
  } else {
    const FeatureMatrix mfcc = MfccBaselineFeatures(wave, fcfg);
    input = AssembleInput(*sys.fap, mfcc.data, energy, emotion);
  }

  switch (mode) {
    case SmoothMode::kNone:
      return PredictFapMeans(*sys.fap, input);
    case SmoothMode::kMlpg:
      return Mlpg(PredictFapMeans(*sys.fap, input), sys.fap->gv);
    case SmoothMode::kWindow: {
      FeatureMatrix in;
      in.data = input;
      const FapModel *fap = sys.fap;
      const auto chunk = [fap](const Mat &x) {
        return Mat(PredictFapMeans(*fap, x).leftCols(kFapDim));
      };
      return SlidingWindowSmooth(chunk, in).data;
    }
  }
  throw InternalError("RunPipeline: bad smoothing mode");
}

// ----------------------------------------------------------------------
// CSV.

namespace {

std::string FmtG17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> SplitCsvLine(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

constexpr const char *kCsvHeader = "system,split,snr_db,mse,pearson_mean,n";

}  // namespace

void EmitCsv(const std::string &path, const EvalReport &report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("EmitCsv: cannot open " + path);
  out << kCsvHeader << "\n";
  for (const EvalRow &r : report.rows) {
    out << r.system << "," << r.split << ","
        << (r.snr_db ? FmtG17(*r.snr_db) : "") << "," << FmtG17(r.mse) << ","
        << FmtG17(r.pearson_mean) << "," << r.n << "\n";
  }
  PPGFACE_CHECK(out.good(), "EmitCsv: write failed for " + path);
}

EvalReport ParseCsv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("ParseCsv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw DataError("ParseCsv: bad header in " + path);
  EvalReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 6)
      throw DataError("ParseCsv: expected 6 fields, got " +
                      std::to_string(f.size()) + " in " + path);
    EvalRow r;
    r.system = f[0];
    r.split = f[1];
    if (!f[2].empty()) r.snr_db = std::stod(f[2]);
    r.mse = std::stod(f[3]);
    r.pearson_mean = std::stod(f[4]);
    r.n = std::stoll(f[5]);
    report.rows.push_back(std::move(r));
  }
  return report;
}

// ----------------------------------------------------------------------
// Harness runs.

namespace {

struct UttData {
  Waveform wave;
  Mat gt_fap;  // T x 32 oracle statics
  Emotion emotion = Emotion::kNeutral;
};

UttData LoadUtt(const std::string &corpus_dir, const ManifestRecord &rec) {
  UttData u;
  u.wave = ReadWav(corpus_dir + "/" + rec.audio_path);
  u.gt_fap = ReadFmtx(corpus_dir + "/" + rec.fap_path).data;
  u.emotion = EmotionFromName(rec.emotion);
  return u;
}

std::vector<ManifestRecord> SplitSample(const CorpusManifest &manifest,
                                        const std::string &split,
                                        int n_samples) {
  std::vector<ManifestRecord> recs = manifest.Split(split);
  if (recs.empty()) throw DataError("EmptySplit: no utterances in '" + split + "'");
  if (static_cast<int>(recs.size()) > n_samples) recs.resize(n_samples);
  return recs;
}

struct UttMetrics {
  double mse = 0.0;
  double pearson_mean = 0.0;
};

UttMetrics Score(const System &sys, const UttData &u) {
  const Mat pred = RunPipeline(sys, u.wave, u.emotion, SmoothMode::kMlpg);
  UttMetrics m;
  m.mse = Mse(pred, u.gt_fap);
  m.pearson_mean = PearsonPerDim(pred, u.gt_fap).mean();
  return m;
}

}  // namespace

EvalReport RunSplitEval(const std::vector<System> &systems,
                        const CorpusManifest &manifest,
                        const std::string &corpus_dir, const std::string &split,
                        const EvalOptions &opts) {
  PPGFACE_CHECK(!systems.empty(), "RunSplitEval: no systems");
  const auto recs = SplitSample(manifest, split, opts.n_samples);
  const size_t n = recs.size(), s = systems.size();

  std::vector<UttMetrics> per_utt(n * s);
  ParallelFor(opts.n_threads, n, [&](size_t i) {
    const UttData u = LoadUtt(corpus_dir, recs[i]);
    for (size_t k = 0; k < s; k++) per_utt[i * s + k] = Score(systems[k], u);
  });

  EvalReport report;
  for (size_t k = 0; k < s; k++) {
    EvalRow row;
    row.system = systems[k].name;
    row.split = split;
    row.n = static_cast<int64_t>(n);
    for (size_t i = 0; i < n; i++) {  // manifest order: deterministic sum
      row.mse += per_utt[i * s + k].mse;
      row.pearson_mean += per_utt[i * s + k].pearson_mean;
    }
    row.mse /= static_cast<double>(n);
    row.pearson_mean /= static_cast<double>(n);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<double> DefaultSnrGrid() {
  std::vector<double> grid;
  for (double snr = 25.0; snr >= -15.0; snr -= 5.0) grid.push_back(snr);
  return grid;
}

EvalReport RunSnrSweep(const std::vector<System> &systems,
                       const CorpusManifest &manifest,
                       const std::string &corpus_dir, const std::string &split,
                       const std::vector<double> &snr_grid,
                       const EvalOptions &opts) {
  PPGFACE_CHECK(!systems.empty(), "RunSnrSweep: no systems");
  PPGFACE_CHECK(!snr_grid.empty(), "RunSnrSweep: empty SNR grid");
  const auto recs = SplitSample(manifest, split, opts.n_samples);
  const size_t n = recs.size(), s = systems.size(), g = snr_grid.size();
  const RngStream base(opts.seed);

  std::vector<UttMetrics> per_utt(n * g * s);
  ParallelFor(opts.n_threads, n, [&](size_t i) {
    const UttData u = LoadUtt(corpus_dir, recs[i]);
    for (size_t j = 0; j < g; j++) {
      // Keyed by utterance only: every SNR level reuses the same noise
      // kind, waveform and crop (common random numbers), so the sweep
      // varies exactly one thing — the noise scale. Also survives
      // reordering and any thread schedule.
      RngStream rng = base.Fork("snr/" + recs[i].utterance_id);
      const NoiseKind kind = kAllNoiseKinds[rng.UniformInt(4)];
      const Waveform noise =
          SynthNoise(kind, u.wave.NumSamples(), rng.Fork("noise").seed());
      UttData noisy = u;
      noisy.wave = MixNoise(u.wave, noise, snr_grid[j], rng);
      for (size_t k = 0; k < s; k++)
        per_utt[(i * g + j) * s + k] = Score(systems[k], noisy);
    }
  });

  EvalReport report;
  for (size_t k = 0; k < s; k++) {
    for (size_t j = 0; j < g; j++) {
      EvalRow row;
      row.system = systems[k].name;
      row.split = split;
      row.snr_db = snr_grid[j];
      row.n = static_cast<int64_t>(n);
      for (size_t i = 0; i < n; i++) {
        row.mse += per_utt[(i * g + j) * s + k].mse;
        row.pearson_mean += per_utt[(i * g + j) * s + k].pearson_mean;
      }
      row.mse /= static_cast<double>(n);
      row.pearson_mean /= static_cast<double>(n);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace ppgface
