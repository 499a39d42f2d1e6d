// src/corpus.cc

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

#include "ppgface/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppgface/fmtx.h"
#include "ppgface/noise.h"
#include "ppgface/parallel.h"

namespace fs = std::filesystem;

namespace ppgface {

namespace {

constexpr int kSamplesPerFrame = 160;   // 10 ms at 16 kHz
constexpr int kFrameTail = 240;         // so T frames need T*160+240 samples
constexpr int kCoartKernel = 9;

// Per-language relative sinusoid amplitudes. Frequencies carry phoneme
// identity; the amplitude pattern is the language's spectral signature.
constexpr std::array<std::array<double, 3>, 3> kLangAmps = {{
    {1.0, 0.50, 0.30},
    {0.15, 1.0, 0.55},
    {0.45, 0.25, 1.0},
}};

// Emotion modulation: affine (gain, offset) for the expressiveness group
// (dims 20-24) and the head-pose group (dims 25-31).
struct EmotionMod {
  double expr_gain, expr_offset, pose_gain, pose_offset;
};
constexpr EmotionMod kEmotionMods[kNumEmotions] = {
    {1.0, 0.0, 1.0, 0.0},     // neutral
    {1.5, 0.8, 1.4, -0.6},    // angry
    {1.3, 0.6, 1.2, 0.4},     // happy
    {0.7, -0.7, 0.8, -0.5},   // sad
};

Vec DrawTarget(RngStream rng) {
  Vec t(kFapDim);
  for (int d = kMouthDimLo; d <= kMouthDimHi; d++) {
    const double mag = rng.Uniform(1.0, 1.5);
    t[d] = rng.Bernoulli(0.5) ? mag : -mag;
  }
  for (int d = kMouthDimHi + 1; d < kEmotionDimLo; d++) t[d] = rng.Uniform(-1.0, 1.0);
  for (int d = kEmotionDimLo; d <= kEmotionDimHi; d++) t[d] = rng.Uniform(-0.5, 0.5);
  return t;
}

std::vector<double> HannKernel(int k) {
  std::vector<double> w(k);
  double sum = 0.0;
  for (int i = 0; i < k; i++) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (i + 1) / (k + 1));
    sum += w[i];
  }
  for (double &v : w) v /= sum;
  return w;
}

}  // namespace

std::string EmotionName(Emotion e) {
  switch (e) {
    case Emotion::kNeutral: return "neutral";
    case Emotion::kAngry: return "angry";
    case Emotion::kHappy: return "happy";
    case Emotion::kSad: return "sad";
  }
  throw InternalError("EmotionName: bad emotion");
}

Emotion EmotionFromName(const std::string &name) {
  for (Emotion e : kAllEmotions)
    if (EmotionName(e) == name) return e;
  throw DataError("unknown emotion: " + name +
                  " (expected neutral|angry|happy|sad)");
}

Eigen::RowVector4d EmotionOneHot(Emotion e) {
  Eigen::RowVector4d v = Eigen::RowVector4d::Zero();
  v[static_cast<int>(e)] = 1.0;
  return v;
}

void CorpusConfig::Validate() const {
  PPGFACE_CHECK(!languages.empty(), "CorpusConfig: need at least one language");
  for (size_t i = 0; i < languages.size(); i++) {
    const LanguageSpec &l = languages[i];
    PPGFACE_CHECK(l.n_phonemes >= 2,
                  "CorpusConfig: each language needs >= 2 phonemes (incl. sil)");
    if (!l.share_targets_with.empty()) {
      bool found = false;
      for (size_t j = 0; j < i; j++) {
        if (languages[j].id == l.share_targets_with) {
          PPGFACE_CHECK(languages[j].n_phonemes == l.n_phonemes,
                        "CorpusConfig: shared-target languages must have equal "
                        "inventory sizes");
          found = true;
        }
      }
      PPGFACE_CHECK(found, "CorpusConfig: share_targets_with must name an "
                           "earlier language: " + l.share_targets_with);
    }
  }
  PPGFACE_CHECK(n_train_speakers >= 1 && n_test_speakers >= 1,
                "CorpusConfig: need at least 1 train and 1 held-out speaker");
  PPGFACE_CHECK(utts_per_speaker >= 1, "CorpusConfig: utts_per_speaker >= 1");
  PPGFACE_CHECK(min_dur_ms >= 500.0 && max_dur_ms >= min_dur_ms,
                "CorpusConfig: bad duration range");
  for (double r : emotion_ratios)
    PPGFACE_CHECK(r > 0, "CorpusConfig: emotion ratios must be positive");
}

const SyntheticPhonemeDef &PhonemeTable::Lookup(const std::string &language_id,
                                               const std::string &symbol) const {
  return defs[space.IndexOf(language_id, symbol)];
}

PhonemeTable BuildPhonemeTable(const CorpusConfig &cfg) {
  cfg.Validate();
  const RngStream base(cfg.master_seed);
  PhonemeTable table;
  std::vector<Inventory> inventories;

  for (size_t li = 0; li < cfg.languages.size(); li++) {
    const LanguageSpec &lang = cfg.languages[li];
    std::vector<std::string> symbols;
    for (int j = 0; j < lang.n_phonemes; j++) {
      SyntheticPhonemeDef def;
      def.unit.language_id = lang.id;
      def.unit.symbol = j == 0 ? "sil" : "p" + std::to_string(j);
      def.target = Vec::Zero(kFapDim);
      if (j == 0) {
        def.is_sil = true;
      } else {
        // Frequencies: a shared-target language reuses the source
        // language's frequencies (so its units are acoustically nearest
        // to their articulatory twins); a fresh language gets its own
        // shift-robust ratio pattern. Amplitude pattern is always the
        // language's own.
        const bool shared = !lang.share_targets_with.empty();
        size_t src_li = li;
        if (shared)
          for (size_t k = 0; k < li; k++)
            if (cfg.languages[k].id == lang.share_targets_with) src_li = k;
        const double f1 = 480.0 * std::pow(1.2, j - 1);
        double r2, r3;
        if (!shared && li > 0) {
          // A fresh language beyond the first uses compact formant
          // chords (all partials within ~1.9*f1). The first language's
          // chords spread to >= 2.2*f1, so the two families are disjoint
          // in formant-ratio space — a speaker-shift-invariant margin.
          // Without it, new-language phones land on the first language's
          // feature clusters and space extension cannot keep them apart.
          r2 = 1.12 + 0.06 * ((j * 3 + static_cast<int>(src_li)) % 7);
          r3 = 1.08 + 0.035 * ((j * 5 + static_cast<int>(src_li)) % 7);
        } else {
          r2 = 1.6 + 0.25 * ((j * 3 + static_cast<int>(src_li)) % 7);
          r3 = 1.35 + 0.12 * ((j * 5 + static_cast<int>(src_li)) % 7);
        }
        def.formants_hz = {f1, f1 * r2, f1 * r2 * r3};
        def.amps = kLangAmps[li % kLangAmps.size()];
        // Articulatory target keyed by the target-owning language so
        // shared languages reproduce it exactly.
        const std::string &target_lang =
            shared ? lang.share_targets_with : lang.id;
        def.target =
            DrawTarget(base.Fork("target/" + target_lang + "/" + def.unit.symbol));
        for (double f : def.formants_hz)
          PPGFACE_ASSERT(f * 1.25 < 7500.0 && f * 0.8 > 100.0,
                         "BuildPhonemeTable: formant out of range");
      }
      table.defs.push_back(std::move(def));
      symbols.push_back(table.defs.back().unit.symbol);
    }
    inventories.emplace_back(lang.id, symbols);
  }
  table.space = PhonemeSpace::Build(inventories);
  return table;
}

std::vector<SpeakerDef> BuildSpeakers(const CorpusConfig &cfg) {
  cfg.Validate();
  std::vector<SpeakerDef> speakers;
  const int n_train = cfg.n_train_speakers;
  for (int i = 0; i < n_train; i++) {
    const double x = n_train == 1 ? 0.5 : static_cast<double>(i) / (n_train - 1);
    SpeakerDef s;
    s.id = "spk" + std::to_string(i);
    // Train shifts span a wide range so the classifier must learn
    // shift-invariant cues (formant ratios, amplitude signatures) —
    // the desk-scale analogue of training an SI-ASR on many speakers.
    s.formant_shift = 0.86 + 0.30 * x;
    s.tilt_db_per_oct = -1.5 + 3.0 * x;
    s.gain = 0.85 + 0.30 * x;
    speakers.push_back(s);
  }
  for (int j = 0; j < cfg.n_test_speakers; j++) {
    SpeakerDef s;
    s.id = "spk" + std::to_string(n_train + j);
    // Held-out shifts sit inside the train span but midway between the
    // train speakers' shift points — new voices, not new vocal-tract
    // physics (an SI-ASR generalizes across speakers, not outside the
    // population it was trained on).
    if (j % 2 == 0) {
      s.formant_shift = 0.91 + 0.005 * (j / 2);
      s.tilt_db_per_oct = -2.5;
      s.gain = 0.78;
    } else {
      s.formant_shift = 1.11 - 0.005 * (j / 2);
      s.tilt_db_per_oct = 2.5;
      s.gain = 1.30;
    }
    speakers.push_back(s);
  }
  return speakers;
}

Mat ArticulatoryOracle(const std::vector<PhoneSegment> &phones, Emotion emotion) {
  PPGFACE_CHECK(!phones.empty(), "ArticulatoryOracle: empty phone sequence");
  Eigen::Index T = 0;
  for (const PhoneSegment &p : phones) {
    PPGFACE_CHECK(p.def != nullptr, "ArticulatoryOracle: null phoneme def");
    PPGFACE_CHECK(p.duration_frames >= 1,
                  "ArticulatoryOracle: durations must be >= 1 frame");
    T += p.duration_frames;
  }

  Mat step(T, kFapDim);
  Eigen::Index t = 0;
  for (const PhoneSegment &p : phones) {
    // sil spans use the closed-mouth (all-zero) target; def.target for
    // sil is already zero by construction.
    for (int i = 0; i < p.duration_frames; i++) step.row(t++) = p.def->target;
  }

  const EmotionMod &mod = kEmotionMods[static_cast<int>(emotion)];
  for (int d = kEmotionDimLo; d <= 24; d++)
    step.col(d) = (step.col(d).array() * mod.expr_gain + mod.expr_offset).matrix();
  for (int d = 25; d <= kEmotionDimHi; d++)
    step.col(d) = (step.col(d).array() * mod.pose_gain + mod.pose_offset).matrix();

  // 9-frame normalized Hann coarticulation, edge-replicated.
  const std::vector<double> kernel = HannKernel(kCoartKernel);
  const int radius = kCoartKernel / 2;
  Mat out(T, kFapDim);
  for (Eigen::Index f = 0; f < T; f++) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(kFapDim);
    for (int i = 0; i < kCoartKernel; i++) {
      Eigen::Index src = f + i - radius;
      src = std::clamp<Eigen::Index>(src, 0, T - 1);
      acc += kernel[i] * step.row(src);
    }
    out.row(f) = acc;
  }
  return out;
}

Waveform SynthUtterance(const std::vector<PhoneSegment> &phones,
                        const SpeakerDef &speaker, uint64_t seed) {
  PPGFACE_CHECK(!phones.empty(), "SynthUtterance: empty phone sequence");
  RngStream rng(seed);
  int total_frames = 0;
  for (const PhoneSegment &p : phones) {
    PPGFACE_CHECK(p.def != nullptr, "SynthUtterance: null phoneme def");
    total_frames += p.duration_frames;
  }
  const size_t n = static_cast<size_t>(total_frames) * kSamplesPerFrame + kFrameTail;

  Waveform wave;
  wave.samples.assign(n, 0.0);
  const int fade = kSampleRate / 200;  // 5 ms = 80 samples

  // Silent spans carry a low-level babble background (unit-RMS babble
  // scaled by a per-utterance level) instead of digital silence: silence
  // stays cleanly separable by frame energy but is spectrally ambiguous
  // phone-like material, so mouth closure genuinely depends on the
  // energy feature rather than on the acoustic front end alone.
  const double bg_level = std::pow(10.0, rng.Uniform(-2.4, -1.3));
  const Waveform bg = SynthNoise(NoiseKind::kBabble, n, rng.NextU64());

  size_t frame = 0;
  for (size_t pi = 0; pi < phones.size(); pi++) {
    const PhoneSegment &p = phones[pi];
    const size_t seg_start = frame * kSamplesPerFrame;
    frame += p.duration_frames;
    const size_t seg_end =
        pi + 1 == phones.size() ? n : frame * kSamplesPerFrame;

    const size_t lo = seg_start >= static_cast<size_t>(fade / 2)
                          ? seg_start - fade / 2 : 0;
    const size_t hi = std::min(n, seg_end + static_cast<size_t>(fade / 2));

    double freq[3] = {0, 0, 0}, phase[3] = {0, 0, 0}, amp[3] = {0, 0, 0};
    if (!p.def->is_sil) {
      double amp_sum = 0.0;
      for (int k = 0; k < 3; k++) {
        freq[k] = p.def->formants_hz[k] * speaker.formant_shift *
                  (1.0 + rng.Uniform(-0.01, 0.01));
        phase[k] = rng.Uniform(0, 2 * M_PI);
        const double tilt_gain = std::pow(
            10.0, speaker.tilt_db_per_oct * std::log2(freq[k] / 500.0) / 20.0);
        amp[k] = p.def->amps[k] * tilt_gain;
        amp_sum += amp[k];
      }
      for (int k = 0; k < 3; k++) amp[k] *= 0.30 * speaker.gain / amp_sum;
    }

    for (size_t i = lo; i < hi; i++) {
      double env = 1.0;
      if (i < seg_start + static_cast<size_t>(fade / 2)) {
        const double u = (static_cast<double>(i) - (static_cast<double>(seg_start) -
                                                    fade / 2)) / fade;
        env = 0.5 - 0.5 * std::cos(M_PI * std::clamp(u, 0.0, 1.0));
      } else if (i + static_cast<size_t>(fade / 2) >= seg_end) {
        const double u = ((static_cast<double>(seg_end) + fade / 2) -
                          static_cast<double>(i)) / fade;
        env = 0.5 - 0.5 * std::cos(M_PI * std::clamp(u, 0.0, 1.0));
      }
      double v;
      if (p.def->is_sil) {
        v = bg_level * bg.samples[i];
      } else {
        v = 0.0;
        for (int k = 0; k < 3; k++)
          v += amp[k] * std::sin(2.0 * M_PI * freq[k] * i / kSampleRate + phase[k]);
      }
      wave.samples[i] += env * v;
    }
  }
  for (double &s : wave.samples) s = std::clamp(s, -1.0, 1.0);
  wave.Validate();
  return wave;
}

void SaveAlignment(const std::string &path,
                   const std::vector<AlignmentSpan> &spans) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("SaveAlignment: cannot open " + path);
  for (const AlignmentSpan &s : spans)
    os << s.start_frame << '\t' << s.end_frame << '\t' << s.language_id << '\t'
       << s.symbol << '\n';
  if (!os) throw IoError("SaveAlignment: write failed: " + path);
}

std::vector<AlignmentSpan> LoadAlignment(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("LoadAlignment: cannot open " + path);
  std::vector<AlignmentSpan> spans;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    AlignmentSpan s;
    std::string lang, sym;
    if (!(ls >> s.start_frame >> s.end_frame >> lang >> sym))
      throw DataError("LoadAlignment: malformed line in " + path + ": " + line);
    s.language_id = lang;
    s.symbol = sym;
    spans.push_back(std::move(s));
  }
  return spans;
}

std::vector<int> AlignmentToLabels(const std::vector<AlignmentSpan> &spans,
                                   const PhonemeSpace &space, Eigen::Index T) {
  std::vector<int> labels(T, -1);
  int expected = 0;
  for (const AlignmentSpan &s : spans) {
    if (s.start_frame != expected || s.end_frame <= s.start_frame)
      throw DataError("AlignmentToLabels: spans must be contiguous and "
                      "non-empty");
    const int idx = static_cast<int>(space.IndexOf(s.language_id, s.symbol));
    for (int t = s.start_frame; t < s.end_frame && t < T; t++) labels[t] = idx;
    expected = s.end_frame;
  }
  if (expected != T)
    throw LengthMismatch("AlignmentToLabels: alignment covers " +
                         std::to_string(expected) + " frames, features have " +
                         std::to_string(T));
  return labels;
}

std::vector<ManifestRecord> CorpusManifest::Split(const std::string &split) const {
  std::vector<ManifestRecord> out;
  for (const ManifestRecord &r : records)
    if (r.split == split) out.push_back(r);
  return out;
}

void CorpusManifest::Save(const std::string &path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("CorpusManifest::Save: cannot open " + path);
  for (const ManifestRecord &r : records)
    os << r.utterance_id << '\t' << r.audio_path << '\t' << r.alignment_path
       << '\t' << r.fap_path << '\t' << r.speaker_id << '\t' << r.language_id
       << '\t' << r.emotion << '\t' << r.split << '\n';
  if (!os) throw IoError("CorpusManifest::Save: write failed: " + path);
}

CorpusManifest CorpusManifest::Load(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("CorpusManifest::Load: cannot open " + path);
  CorpusManifest m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    size_t pos = 0;
    while (true) {
      const size_t tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (cols.size() != 8)
      throw DataError("CorpusManifest::Load: expected 8 columns in " + path);
    m.records.push_back({cols[0], cols[1], cols[2], cols[3], cols[4], cols[5],
                         cols[6], cols[7]});
  }
  return m;
}

Emotion DrawEmotion(const std::array<double, 4> &ratios, RngStream &rng) {
  const double total = ratios[0] + ratios[1] + ratios[2] + ratios[3];
  double u = rng.Uniform() * total;
  for (int e = 0; e < kNumEmotions; e++) {
    if (u < ratios[e]) return static_cast<Emotion>(e);
    u -= ratios[e];
  }
  return Emotion::kSad;
}

namespace {

std::vector<PhoneSegment> DrawPhoneSequence(const PhonemeTable &table,
                                            const std::string &lang_id,
                                            int target_frames, RngStream &rng) {
  std::vector<const SyntheticPhonemeDef *> inv;
  for (const SyntheticPhonemeDef &d : table.defs)
    if (d.unit.language_id == lang_id) inv.push_back(&d);
  PPGFACE_ASSERT(inv.size() >= 2, "DrawPhoneSequence: unknown language");

  std::vector<PhoneSegment> phones;
  auto sil = [&](int lo, int hi) {
    phones.push_back({inv[0], lo + static_cast<int>(rng.UniformInt(hi - lo + 1))});
  };
  sil(25, 45);
  int frames = phones.back().duration_frames;
  while (frames < target_frames) {
    const SyntheticPhonemeDef *d = inv[1 + rng.UniformInt(inv.size() - 1)];
    const int dur = 8 + static_cast<int>(rng.UniformInt(23));
    phones.push_back({d, dur});
    frames += dur;
    if (rng.Bernoulli(0.25)) {
      sil(15, 30);
      frames += phones.back().duration_frames;
    }
  }
  sil(25, 45);
  return phones;
}

}  // namespace

CorpusManifest GenCorpus(const CorpusConfig &cfg, const std::string &out_dir,
                         int n_threads) {
  cfg.Validate();
  PPGFACE_CHECK(n_threads >= 1, "GenCorpus: n_threads must be >= 1");
  const PhonemeTable table = BuildPhonemeTable(cfg);
  const std::vector<SpeakerDef> speakers = BuildSpeakers(cfg);

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  fs::create_directories(fs::path(out_dir) / "align", ec);
  fs::create_directories(fs::path(out_dir) / "fap", ec);
  if (ec) throw IoError("GenCorpus: cannot create " + out_dir);
  table.space.Save((fs::path(out_dir) / "phoneme_space.tsv").string());

  // Plan all records up front (single-threaded, deterministic), then
  // generate file contents in parallel keyed only by the plan.
  struct Plan {
    ManifestRecord record;
    const SpeakerDef *speaker;
  };
  std::vector<Plan> plans;
  const size_t n_langs = cfg.languages.size();
  int global = 0;
  for (size_t si = 0; si < speakers.size(); si++) {
    const bool train_spk = si < static_cast<size_t>(cfg.n_train_speakers);
    for (int u = 0; u < cfg.utts_per_speaker; u++, global++) {
      size_t lang_idx;
      std::string split;
      if (train_spk) {
        if (n_langs > 1 && u % 4 == 3) {
          lang_idx = 1;
          split = "unseen_language";
        } else {
          lang_idx = 0;
          split = u % 8 == 0 ? "normal" : "train";
        }
      } else {
        if (n_langs > 1 && u % 2 == 1) {
          lang_idx = 1;
          split = "mixed";
        } else {
          lang_idx = 0;
          split = "unseen_speaker";
        }
      }
      const std::string &lang = cfg.languages[lang_idx].id;
      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "utt%04d", global);
      Plan p;
      p.speaker = &speakers[si];
      p.record.utterance_id =
          std::string(idbuf) + "_" + speakers[si].id + "_" + lang;
      p.record.audio_path = "wav/" + p.record.utterance_id + ".wav";
      p.record.alignment_path = "align/" + p.record.utterance_id + ".ali";
      p.record.fap_path = "fap/" + p.record.utterance_id + ".fmtx";
      p.record.speaker_id = speakers[si].id;
      p.record.language_id = lang;
      p.record.split = split;
      plans.push_back(std::move(p));
    }
  }

  const RngStream base(cfg.master_seed);
  ParallelFor(n_threads, plans.size(), [&](size_t i) {
    Plan &p = plans[i];
    RngStream rng = base.Fork("utt/" + p.record.utterance_id);
    const Emotion emotion = DrawEmotion(cfg.emotion_ratios, rng);
    p.record.emotion = EmotionName(emotion);
    const int target_frames = static_cast<int>(
        std::lround(rng.Uniform(cfg.min_dur_ms, cfg.max_dur_ms) / 10.0));
    const std::vector<PhoneSegment> phones =
        DrawPhoneSequence(table, p.record.language_id, target_frames, rng);

    const Waveform wave =
        SynthUtterance(phones, *p.speaker, rng.Fork("wav").seed());
    WriteWav((fs::path(out_dir) / p.record.audio_path).string(), wave);

    std::vector<AlignmentSpan> spans;
    int t = 0;
    for (const PhoneSegment &ph : phones) {
      spans.push_back({t, t + ph.duration_frames, ph.def->unit.language_id,
                       ph.def->unit.symbol});
      t += ph.duration_frames;
    }
    SaveAlignment((fs::path(out_dir) / p.record.alignment_path).string(), spans);

    FeatureMatrix fap;
    fap.kind = FeatureKind::kFap;
    fap.frame_shift_ms = 10.0;
    fap.data = ArticulatoryOracle(phones, emotion);
    WriteFmtx((fs::path(out_dir) / p.record.fap_path).string(), fap);
  });

  CorpusManifest manifest;
  for (Plan &p : plans) manifest.records.push_back(std::move(p.record));
  manifest.Save((fs::path(out_dir) / "manifest.tsv").string());
  return manifest;
}

}  // namespace ppgface
