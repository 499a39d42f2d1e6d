// tools/ppgface_main.cc

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

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <thread>

#include "ppgface/fmtx.h"
#include "ppgface/pipeline.h"

namespace ppgface {
namespace {

namespace fs = std::filesystem;

int DefaultThreads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

RunConfig LoadConfigOrDefault(const std::string &path) {
  return path.empty() ? RunConfig() : LoadRunConfig(path);
}

std::string CorpusDirOf(const std::string &manifest_path) {
  const fs::path dir = fs::path(manifest_path).parent_path();
  return dir.empty() ? "." : dir.string();
}

// Quantizes to the f32 grid FMTX stores, so persisted and in-memory
// intermediates smooth to identical statics.
Mat QuantizeF32(const Mat &m) {
  return m.cast<float>().cast<double>();
}

struct Args {
  std::string config, out, manifest, model, audio, kind;
  std::string ppg_model, fap_model, mfcc_fap_model, split, means;
  std::string emotion = "neutral", smooth = "mlpg", languages;
  int threads = DefaultThreads();
  int n_samples = 0;       // 0 = use config value
  uint64_t seed = 0;       // 0 = use config value
  bool seed_set = false;
};

std::vector<std::string> SplitCommaList(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int RunCorpusGen(const Args &a) {
  RunConfig cfg = LoadConfigOrDefault(a.config);
  if (a.seed_set) cfg.corpus.master_seed = a.seed;
  const CorpusManifest manifest = GenCorpus(cfg.corpus, a.out, a.threads);
  std::cout << "wrote " << manifest.records.size() << " utterances to " << a.out
            << "\n";
  return 0;
}

int RunFeaturesExtract(const Args &a) {
  const CorpusManifest manifest = CorpusManifest::Load(a.manifest);
  const std::string dir = CorpusDirOf(a.manifest);
  fs::create_directories(a.out);
  const FrameConfig fcfg;
  for (const ManifestRecord &rec : manifest.records) {
    const Waveform wave = ReadWav(dir + "/" + rec.audio_path);
    FeatureMatrix m;
    if (a.kind == "logmel") {
      m = DynamicFeatures(LogMel(wave, fcfg));
      m.kind = FeatureKind::kLogMel;
    } else if (a.kind == "energy") {
      m = FrameEnergy(wave, fcfg);
    } else {  // mfcc
      m = MfccBaselineFeatures(wave, fcfg);
    }
    WriteFmtx(a.out + "/" + rec.utterance_id + "." + a.kind + ".fmtx", m);
  }
  std::cout << "wrote " << manifest.records.size() << " " << a.kind
            << " files to " << a.out << "\n";
  return 0;
}

int RunPpgTrain(const Args &a) {
  RunConfig cfg = LoadConfigOrDefault(a.config);
  if (a.seed_set) cfg.ppg_train.seed = a.seed;
  const CorpusManifest manifest = CorpusManifest::Load(a.manifest);
  const PpgModel model =
      TrainPpgPipeline(cfg, manifest, CorpusDirOf(a.manifest),
                       SplitCommaList(a.languages), a.threads);
  SavePpgModel(a.out, model);
  std::cout << "wrote " << a.out << " (" << model.space.size() << " units)\n";
  return 0;
}

int RunPpgExtract(const Args &a) {
  const PpgModel model = LoadPpgModel(a.model);
  const Waveform wave = ReadWav(a.audio);
  const Ppg ppg =
      ExtractPpg(model, DynamicFeatures(LogMel(wave, FrameConfig())));
  FeatureMatrix m;
  m.data = ppg.matrix;
  m.kind = FeatureKind::kPpg;
  WriteFmtx(a.out, m, ppg.space_checksum);
  std::cout << "wrote " << a.out << " (" << m.data.rows() << " frames)\n";
  return 0;
}

int RunFapTrain(const Args &a) {
  RunConfig cfg = LoadConfigOrDefault(a.config);
  if (a.seed_set) cfg.fap_train.seed = a.seed;
  const CorpusManifest manifest = CorpusManifest::Load(a.manifest);
  PpgModel ppg;
  const PpgModel *ppg_ptr = nullptr;
  if (!a.ppg_model.empty()) {
    ppg = LoadPpgModel(a.ppg_model);
    ppg_ptr = &ppg;
  }
  const FapModel model = TrainFapPipeline(cfg, ppg_ptr, manifest,
                                          CorpusDirOf(a.manifest), a.threads);
  SaveFapModel(a.out, model);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

int RunGenerate(const Args &a) {
  PpgModel ppg;
  const PpgModel *ppg_ptr = nullptr;
  if (!a.ppg_model.empty()) {
    ppg = LoadPpgModel(a.ppg_model);
    ppg_ptr = &ppg;
  }
  const FapModel fap = LoadFapModel(a.fap_model);
  const System sys{"cli", ppg_ptr, &fap};
  const Waveform wave = ReadWav(a.audio);
  const Emotion emotion = EmotionFromName(a.emotion);

  FeatureMatrix out;
  out.kind = FeatureKind::kFap;
  if (a.smooth == "window") {
    out.data = RunPipeline(sys, wave, emotion, SmoothMode::kWindow);
  } else {
    const Mat means =
        QuantizeF32(RunPipeline(sys, wave, emotion, SmoothMode::kNone));
    out.data = a.smooth == "none" ? means : Mlpg(means, fap.gv);
  }
  WriteFmtx(a.out, out);
  std::cout << "wrote " << a.out << " (" << out.data.rows() << " x "
            << out.data.cols() << ")\n";
  return 0;
}

int RunSmooth(const Args &a) {
  const FapModel fap = LoadFapModel(a.fap_model);
  const FeatureMatrix means = ReadFmtx(a.means);
  if (means.Dim() != fap.cfg.output_dim)
    throw ShapeMismatch("smooth: means have " + std::to_string(means.Dim()) +
                        " cols, expected " +
                        std::to_string(fap.cfg.output_dim));
  FeatureMatrix out;
  out.kind = FeatureKind::kFap;
  out.data = Mlpg(means.data, fap.gv);
  WriteFmtx(a.out, out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

std::vector<System> BuildSystems(const Args &a, PpgModel &ppg, FapModel &fap,
                                 FapModel &mfcc_fap) {
  std::vector<System> systems;
  if (!a.fap_model.empty()) {
    if (a.ppg_model.empty())
      throw UsageError("eval: --fap-model requires --ppg-model");
    ppg = LoadPpgModel(a.ppg_model);
    fap = LoadFapModel(a.fap_model);
    systems.push_back({"ppg-blstm", &ppg, &fap});
  }
  if (!a.mfcc_fap_model.empty()) {
    mfcc_fap = LoadFapModel(a.mfcc_fap_model);
    systems.push_back({"mfcc-blstm", nullptr, &mfcc_fap});
  }
  if (systems.empty())
    throw UsageError("eval: no systems given (--fap-model / --mfcc-fap-model)");
  return systems;
}

int RunEval(const Args &a, bool sweep) {
  RunConfig cfg = LoadConfigOrDefault(a.config);
  if (a.seed_set) cfg.eval.seed = a.seed;
  if (a.n_samples > 0) cfg.eval.n_samples = a.n_samples;
  cfg.eval.n_threads = a.threads;
  const CorpusManifest manifest = CorpusManifest::Load(a.manifest);
  const std::string dir = CorpusDirOf(a.manifest);

  PpgModel ppg;
  FapModel fap, mfcc_fap;
  const std::vector<System> systems = BuildSystems(a, ppg, fap, mfcc_fap);
  const EvalReport report =
      sweep ? RunSnrSweep(systems, manifest, dir, a.split, DefaultSnrGrid(),
                          cfg.eval)
            : RunSplitEval(systems, manifest, dir, a.split, cfg.eval);
  EmitCsv(a.out, report);
  std::cout << "wrote " << a.out << " (" << report.rows.size() << " rows)\n";
  return 0;
}

int Main(int argc, char **argv) {
  CLI::App app{"Speech-driven facial animation pipeline"};
  app.require_subcommand(1);
  Args a;

  const auto add_seed = [&](CLI::App *cmd) {
    cmd->add_option("--seed", a.seed, "Override the config seed")
        ->each([&](const std::string &) { a.seed_set = true; });
  };
  const auto add_threads = [&](CLI::App *cmd) {
    cmd->add_option("--threads", a.threads, "Worker thread cap");
  };

  CLI::App *corpus = app.add_subcommand("corpus", "Corpus operations");
  corpus->require_subcommand(1);
  CLI::App *corpus_gen = corpus->add_subcommand("gen", "Generate the corpus");
  corpus_gen->add_option("--config", a.config, "Run configuration file");
  corpus_gen->add_option("--out", a.out, "Output directory")->required();
  add_seed(corpus_gen);
  add_threads(corpus_gen);

  CLI::App *features = app.add_subcommand("features", "Feature operations");
  features->require_subcommand(1);
  CLI::App *fx = features->add_subcommand("extract", "Extract features");
  fx->add_option("--manifest", a.manifest, "Corpus manifest")->required();
  fx->add_option("--kind", a.kind, "Feature kind")
      ->required()
      ->check(CLI::IsMember({"logmel", "energy", "mfcc"}));
  fx->add_option("--out", a.out, "Output directory")->required();
  add_threads(fx);

  CLI::App *ppg = app.add_subcommand("ppg", "PPG extractor operations");
  ppg->require_subcommand(1);
  CLI::App *ppg_train = ppg->add_subcommand("train", "Train the extractor");
  ppg_train->add_option("--config", a.config, "Run configuration file");
  ppg_train->add_option("--manifest", a.manifest, "Corpus manifest")->required();
  ppg_train->add_option("--languages", a.languages,
                        "Comma-separated training languages (default: first)");
  ppg_train->add_option("--out", a.out, "Output checkpoint")->required();
  add_seed(ppg_train);
  add_threads(ppg_train);
  CLI::App *ppg_extract = ppg->add_subcommand("extract", "Extract a PPG");
  ppg_extract->add_option("--model", a.model, "PPG checkpoint")->required();
  ppg_extract->add_option("--audio", a.audio, "Input WAV")->required();
  ppg_extract->add_option("--out", a.out, "Output FMTX")->required();

  CLI::App *fap = app.add_subcommand("fap", "FAP predictor operations");
  fap->require_subcommand(1);
  CLI::App *fap_train = fap->add_subcommand("train", "Train the predictor");
  fap_train->add_option("--config", a.config, "Run configuration file");
  fap_train->add_option("--manifest", a.manifest, "Corpus manifest")->required();
  fap_train->add_option("--ppg-model", a.ppg_model,
                        "PPG checkpoint (omit for the MFCC baseline)");
  fap_train->add_option("--out", a.out, "Output checkpoint")->required();
  add_seed(fap_train);
  add_threads(fap_train);

  CLI::App *gen = app.add_subcommand("generate", "Audio to FAP trajectory");
  gen->add_option("--ppg-model", a.ppg_model,
                  "PPG checkpoint (omit for the MFCC baseline)");
  gen->add_option("--fap-model", a.fap_model, "FAP checkpoint")->required();
  gen->add_option("--audio", a.audio, "Input WAV")->required();
  gen->add_option("--emotion", a.emotion, "Emotion label")
      ->check(CLI::IsMember({"neutral", "angry", "happy", "sad"}));
  gen->add_option("--smooth", a.smooth, "Trajectory smoothing")
      ->check(CLI::IsMember({"mlpg", "window", "none"}));
  gen->add_option("--out", a.out, "Output FMTX")->required();

  CLI::App *smooth = app.add_subcommand("smooth", "MLPG on saved means");
  smooth->add_option("--means", a.means, "96-col means FMTX")->required();
  smooth->add_option("--fap-model", a.fap_model,
                     "FAP checkpoint (for the global variance)")
      ->required();
  smooth->add_option("--out", a.out, "Output FMTX")->required();

  CLI::App *eval = app.add_subcommand("eval", "Evaluation harness");
  eval->require_subcommand(1);
  const auto add_eval_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", a.config, "Run configuration file");
    cmd->add_option("--manifest", a.manifest, "Corpus manifest")->required();
    cmd->add_option("--ppg-model", a.ppg_model, "PPG checkpoint");
    cmd->add_option("--fap-model", a.fap_model, "PPG-input FAP checkpoint");
    cmd->add_option("--mfcc-fap-model", a.mfcc_fap_model,
                    "MFCC-baseline FAP checkpoint");
    cmd->add_option("--n", a.n_samples, "Utterance cap per split");
    cmd->add_option("--out", a.out, "Output CSV")->required();
    add_seed(cmd);
    add_threads(cmd);
  };
  CLI::App *eval_split = eval->add_subcommand("split", "Clean-split report");
  eval_split->add_option("--split", a.split, "Manifest split")->required();
  add_eval_common(eval_split);
  CLI::App *eval_snr = eval->add_subcommand("snr", "SNR sweep report");
  eval_snr->add_option("--split", a.split, "Manifest split")->required();
  add_eval_common(eval_snr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (corpus_gen->parsed()) return RunCorpusGen(a);
    if (fx->parsed()) return RunFeaturesExtract(a);
    if (ppg_train->parsed()) return RunPpgTrain(a);
    if (ppg_extract->parsed()) return RunPpgExtract(a);
    if (fap_train->parsed()) return RunFapTrain(a);
    if (gen->parsed()) return RunGenerate(a);
    if (smooth->parsed()) return RunSmooth(a);
    if (eval_split->parsed()) return RunEval(a, /*sweep=*/false);
    if (eval_snr->parsed()) return RunEval(a, /*sweep=*/true);
    throw InternalError("no subcommand dispatched");
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace
}  // namespace ppgface

int main(int argc, char **argv) { return ppgface::Main(argc, argv); }
