// src/pipeline.cc

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

#include "ppgface/pipeline.h"

#include <algorithm>

#include "ppgface/fmtx.h"
#include "ppgface/noise.h"
#include "ppgface/parallel.h"

namespace ppgface {

PhonemeSpace SubspaceForLanguages(const PhonemeSpace &space,
                                  const std::vector<std::string> &languages) {
  std::vector<Inventory> inventories;
  for (const std::string &lang : languages) {
    if (!space.HasLanguage(lang))
      throw SpaceMismatch("SubspaceForLanguages: language '" + lang +
                          "' not in the space");
    Inventory inv{lang, {}};
    for (const PhonemeUnit &u : space.units())
      if (u.language_id == lang) inv.second.push_back(u.symbol);
    inventories.push_back(std::move(inv));
  }
  return PhonemeSpace::Build(inventories);
}

namespace {

std::vector<ManifestRecord> RecordsForSplits(
    const CorpusManifest &manifest, const std::vector<std::string> &splits) {
  std::vector<ManifestRecord> recs;
  for (const ManifestRecord &r : manifest.records)
    if (std::find(splits.begin(), splits.end(), r.split) != splits.end())
      recs.push_back(r);
  PPGFACE_CHECK(!recs.empty(), "pipeline: no utterances in the requested splits");
  return recs;
}

}  // namespace

std::vector<PpgExample> BuildPpgDataset(
    const CorpusManifest &manifest, const std::string &corpus_dir,
    const PhonemeSpace &space, const std::vector<std::string> &splits,
    int noise_augment_copies, uint64_t seed, int n_threads) {
  PPGFACE_CHECK(noise_augment_copies >= 0,
                "BuildPpgDataset: negative noise_augment_copies");
  const auto recs = RecordsForSplits(manifest, splits);
  const RngStream base(seed);
  const std::vector<double> snr_grid = DefaultSnrGrid();
  const FrameConfig fcfg;

  std::vector<std::vector<PpgExample>> per_rec(recs.size());
  ParallelFor(n_threads, recs.size(), [&](size_t i) {
    const ManifestRecord &rec = recs[i];
    const Waveform clean = ReadWav(corpus_dir + "/" + rec.audio_path);
    const auto spans = LoadAlignment(corpus_dir + "/" + rec.alignment_path);
    const Eigen::Index T = NumFramesFor(clean.NumSamples(), fcfg);
    const std::vector<int> labels = AlignmentToLabels(spans, space, T);

    PpgExample ex;
    ex.features = DynamicFeatures(LogMel(clean, fcfg));
    ex.labels = labels;
    per_rec[i].push_back(std::move(ex));

    for (int c = 0; c < noise_augment_copies; c++) {
      RngStream rng = base.Fork("aug/" + rec.utterance_id + "/" +
                                std::to_string(c));
      const NoiseKind kind = kAllNoiseKinds[rng.UniformInt(4)];
      const double snr = snr_grid[rng.UniformInt(snr_grid.size())];
      const Waveform noise =
          SynthNoise(kind, clean.NumSamples(), rng.Fork("noise").seed());
      const Waveform noisy = MixNoise(clean, noise, snr, rng, fcfg);
      PpgExample aug;
      aug.features = DynamicFeatures(LogMel(noisy, fcfg));
      aug.labels = labels;
      per_rec[i].push_back(std::move(aug));
    }
  });

  std::vector<PpgExample> out;
  for (auto &v : per_rec)
    for (auto &e : v) out.push_back(std::move(e));
  return out;
}

std::vector<FapExample> BuildFapDataset(FapModel *model, const PpgModel *ppg,
                                        const CorpusManifest &manifest,
                                        const std::string &corpus_dir,
                                        const std::vector<std::string> &splits,
                                        int n_threads) {
  if (ppg != nullptr &&
      model->cfg.feature_dim != static_cast<int>(ppg->space.size()))
    throw ShapeMismatch("BuildFapDataset: FAP feature_dim " +
                        std::to_string(model->cfg.feature_dim) +
                        " != PPG space size " +
                        std::to_string(ppg->space.size()));
  const auto recs = RecordsForSplits(manifest, splits);
  const FrameConfig fcfg;

  struct Loaded {
    Mat features;  // PPG posteriors or MFCC dynamics
    FeatureMatrix energy;
    Mat target;  // windowed dynamics of the oracle statics
    Emotion emotion;
  };
  std::vector<Loaded> loaded(recs.size());
  ParallelFor(n_threads, recs.size(), [&](size_t i) {
    const ManifestRecord &rec = recs[i];
    const Waveform wave = ReadWav(corpus_dir + "/" + rec.audio_path);
    Loaded &l = loaded[i];
    l.energy = FrameEnergy(wave, fcfg);
    l.features = ppg != nullptr
                     ? ExtractPpg(*ppg, DynamicFeatures(LogMel(wave, fcfg))).matrix
                     : MfccBaselineFeatures(wave, fcfg).data;
    const Mat statics = ReadFmtx(corpus_dir + "/" + rec.fap_path).data;
    if (statics.rows() != l.features.rows())
      throw LengthMismatch("BuildFapDataset: FAP frames " +
                           std::to_string(statics.rows()) +
                           " != audio frames " +
                           std::to_string(l.features.rows()) + " for " +
                           rec.utterance_id);
    l.target = ApplyMlpgWindows(statics);
    l.emotion = EmotionFromName(rec.emotion);
  });

  model->space_checksum = ppg != nullptr ? ppg->space.checksum() : 0;
  {
    std::vector<FeatureMatrix> energies;
    for (const Loaded &l : loaded) energies.push_back(l.energy);
    SetEnergyStats(model, energies);
  }

  std::vector<FapExample> out;
  for (const Loaded &l : loaded) {
    FapExample ex;
    ex.input = AssembleInput(*model, l.features, l.energy, l.emotion);
    ex.target = l.target;
    ex.emotion = l.emotion;
    out.push_back(std::move(ex));
  }
  return out;
}

PpgModel TrainPpgPipeline(const RunConfig &cfg, const CorpusManifest &manifest,
                          const std::string &corpus_dir,
                          const std::vector<std::string> &languages,
                          int n_threads) {
  const PhonemeSpace full =
      PhonemeSpace::Load(corpus_dir + "/phoneme_space.tsv");
  std::vector<std::string> langs = languages;
  if (langs.empty()) {
    PPGFACE_CHECK(full.size() > 0, "TrainPpgPipeline: empty phoneme space");
    langs.push_back(full.units()[0].language_id);
  }
  const PhonemeSpace space = SubspaceForLanguages(full, langs);
  PpgModel model = BuildPpgModel(cfg.ppg, space, cfg.ppg_train.seed);
  const auto dataset =
      BuildPpgDataset(manifest, corpus_dir, space, {"train"},
                      cfg.noise_augment_copies, cfg.ppg_train.seed, n_threads);
  TrainPpg(&model, dataset, cfg.ppg_train);
  return model;
}

FapModel TrainFapPipeline(const RunConfig &cfg, const PpgModel *ppg,
                          const CorpusManifest &manifest,
                          const std::string &corpus_dir, int n_threads) {
  FapPredictorConfig fcfg = cfg.fap;
  fcfg.feature_dim =
      ppg != nullptr ? static_cast<int>(ppg->space.size()) : 3 * kNumCepstra;
  FapModel model = BuildFapModel(fcfg, cfg.fap_train.seed);
  const auto dataset =
      BuildFapDataset(&model, ppg, manifest, corpus_dir, {"train"}, n_threads);
  TrainFap(&model, dataset, cfg.fap_train);
  return model;
}

}  // namespace ppgface
