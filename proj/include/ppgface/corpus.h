// include/ppgface/corpus.h

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

#ifndef PPGFACE_CORPUS_H_
#define PPGFACE_CORPUS_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ppgface/phoneme_space.h"
#include "ppgface/rng.h"
#include "ppgface/trajectory.h"
#include "ppgface/wav.h"

namespace ppgface {

// ----------------------------------------------------------------------
// Emotion labels, ratio 2.5:1:1:1 (neutral:angry:happy:sad).

enum class Emotion { kNeutral = 0, kAngry = 1, kHappy = 2, kSad = 3 };
constexpr int kNumEmotions = 4;
constexpr Emotion kAllEmotions[] = {Emotion::kNeutral, Emotion::kAngry,
                                    Emotion::kHappy, Emotion::kSad};

std::string EmotionName(Emotion e);
Emotion EmotionFromName(const std::string &name);
Eigen::RowVector4d EmotionOneHot(Emotion e);

/// One emotion sample at the configured ratios.
Emotion DrawEmotion(const std::array<double, 4> &ratios, RngStream &rng);

// ----------------------------------------------------------------------
// Synthetic phoneme and speaker definitions.
//
// FAP dim semantics used by the oracle (all documented, all synthetic):
//   dims 0-9    mouth group; closed-mouth target is exactly 0
//   dims 10-19  other face dims
//   dims 20-24  expressiveness group, modulated by emotion
//   dims 25-31  head pose, modulated by emotion

constexpr int kMouthDimLo = 0, kMouthDimHi = 9;
constexpr int kEmotionDimLo = 20, kEmotionDimHi = 31;

/// Half-width of the closed-mouth tolerance band: a mouth dim counts as
/// closed when |value| <= this. Calibrated so the oracle's own
/// trajectories stay in band on all but ~1 frame per silence boundary.
constexpr double kClosedMouthTolerance = 0.6;

struct SyntheticPhonemeDef {
  PhonemeUnit unit;
  std::array<double, 3> formants_hz{};  // sinusoid frequencies
  std::array<double, 3> amps{};         // relative amplitudes (language signature)
  Vec target;                           // 32-dim articulatory target
  bool is_sil = false;
};

struct SpeakerDef {
  std::string id;
  double formant_shift = 1.0;       // multiplicative, in [0.86, 1.16]
  double tilt_db_per_oct = 0.0;     // spectral tilt relative to 500 Hz
  double gain = 1.0;                // linear amplitude gain
};

struct LanguageSpec {
  std::string id;
  int n_phonemes = 8;  // includes the reserved "sil" unit
  std::string share_targets_with;  // reuse this language's articulatory targets
};

struct CorpusConfig {
  std::vector<LanguageSpec> languages = {{"alpha", 8, ""}, {"beta", 8, "alpha"}};
  int n_train_speakers = 4;
  int n_test_speakers = 2;
  int utts_per_speaker = 24;
  double min_dur_ms = 1500.0;
  double max_dur_ms = 2500.0;
  std::array<double, 4> emotion_ratios = {2.5, 1.0, 1.0, 1.0};
  uint64_t master_seed = 1234;

  void Validate() const;
};

/// Phoneme definition table plus the phoneme space it induces.
struct PhonemeTable {
  std::vector<SyntheticPhonemeDef> defs;  // index-aligned with space units
  PhonemeSpace space;

  const SyntheticPhonemeDef &Lookup(const std::string &language_id,
                                    const std::string &symbol) const;
};

/// Deterministic table from the config (languages + master_seed).
PhonemeTable BuildPhonemeTable(const CorpusConfig &cfg);

/// Deterministic speaker roster: first n_train_speakers are the training
/// speakers (formant shifts spanning [0.86, 1.16]); the rest are held-out
/// speakers with shifts inside that span but away from every training
/// speaker's shift, plus their own tilt/gain signatures.
std::vector<SpeakerDef> BuildSpeakers(const CorpusConfig &cfg);

// ----------------------------------------------------------------------
// Utterance-level synthesis.

struct PhoneSegment {
  const SyntheticPhonemeDef *def = nullptr;
  int duration_frames = 0;
};

/// Oracle FAP trajectory: per-phoneme articulatory step targets (sil
/// pulled to the closed-mouth target), emotion affine on dims 20-31,
/// then per-dim smoothing with a normalized 9-frame Hann kernel
/// (edge-replicated).
Mat ArticulatoryOracle(const std::vector<PhoneSegment> &phones, Emotion emotion);

/// Formant-sinusoid waveform: 3 sinusoids per phoneme at speaker-shifted
/// frequencies with +-1% seeded jitter, speaker tilt/gain, 5 ms raised
/// cosine cross-fades at boundaries; "sil" spans carry a babble
/// background at a low per-utterance level (energy-separable from
/// speech, spectrally phone-like).
/// Sample count = total_frames*160 + 240 so framing yields exactly
/// sum(duration_frames) frames.
Waveform SynthUtterance(const std::vector<PhoneSegment> &phones,
                        const SpeakerDef &speaker, uint64_t seed);

// ----------------------------------------------------------------------
// Alignments.

struct AlignmentSpan {
  int start_frame = 0;  // inclusive
  int end_frame = 0;    // exclusive
  std::string language_id;
  std::string symbol;
};

void SaveAlignment(const std::string &path, const std::vector<AlignmentSpan> &spans);
std::vector<AlignmentSpan> LoadAlignment(const std::string &path);

/// Per-frame label indices into the space. Throws on gaps/overlaps or
/// total length mismatch.
std::vector<int> AlignmentToLabels(const std::vector<AlignmentSpan> &spans,
                                   const PhonemeSpace &space, Eigen::Index T);

// ----------------------------------------------------------------------
// Corpus generation.

struct ManifestRecord {
  std::string utterance_id;
  std::string audio_path;      // relative to the manifest's directory
  std::string alignment_path;
  std::string fap_path;
  std::string speaker_id;
  std::string language_id;
  std::string emotion;
  std::string split;  // train | normal | unseen_speaker | unseen_language | mixed
};

struct CorpusManifest {
  std::vector<ManifestRecord> records;

  std::vector<ManifestRecord> Split(const std::string &split) const;
  void Save(const std::string &path) const;
  static CorpusManifest Load(const std::string &path);
};

/// Generates the corpus tree under out_dir (WAVs, alignments, FMTX FAP
/// files, phoneme space, manifest.tsv). Per-utterance RNG is seeded by
/// hash(master_seed, utterance_id); output is bitwise independent of
/// n_threads and generation order.
CorpusManifest GenCorpus(const CorpusConfig &cfg, const std::string &out_dir,
                         int n_threads = 1);

}  // namespace ppgface

#endif  // PPGFACE_CORPUS_H_
