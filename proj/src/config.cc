// src/config.cc

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

#include "ppgface/config.h"

#include <fstream>
#include <sstream>

namespace ppgface {

namespace {

std::string Trim(const std::string &s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int ParseInt(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception &) {
    throw DataError("config: key '" + key + "': not an integer: '" + v + "'");
  }
}

uint64_t ParseU64(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    const uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception &) {
    throw DataError("config: key '" + key + "': not an integer: '" + v + "'");
  }
}

double ParseReal(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception &) {
    throw DataError("config: key '" + key + "': not a number: '" + v + "'");
  }
}

bool ParseBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw DataError("config: key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace

void RunConfig::Validate() const {
  corpus.Validate();
  ppg.Validate();
  FapPredictorConfig f = fap;
  f.feature_dim = 1;  // placeholder; the real dim is set per model
  f.Validate();
  PPGFACE_CHECK(ppg_train.max_epochs >= 1 && fap_train.max_epochs >= 1,
                "config: max_epochs must be >= 1");
  PPGFACE_CHECK(ppg_train.lr > 0 && fap_train.lr > 0, "config: lr must be > 0");
  PPGFACE_CHECK(ppg_train.batch_frames >= 1, "config: batch_frames >= 1");
  PPGFACE_CHECK(eval.n_samples >= 1, "config: eval n_samples >= 1");
  PPGFACE_CHECK(eval.n_threads >= 1, "config: eval n_threads >= 1");
  PPGFACE_CHECK(noise_augment_copies >= 0,
                "config: noise_augment_copies must be >= 0");
}

RunConfig ParseRunConfig(const std::string &text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw DataError("config line " + std::to_string(line_no) +
                        ": malformed section header '" + line + "'");
      section = line.substr(1, line.size() - 2);
      if (section != "corpus" && section != "ppg" && section != "fap" &&
          section != "eval")
        throw DataError("config line " + std::to_string(line_no) +
                        ": unknown section '" + section + "'");
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(line_no) +
                      ": expected key=value, got '" + line + "'");
    const std::string key = Trim(line.substr(0, eq));
    const std::string val = Trim(line.substr(eq + 1));
    const std::string qkey = section.empty() ? key : section + "." + key;

    if (qkey == "corpus.train_speakers") {
      cfg.corpus.n_train_speakers = ParseInt(qkey, val);
    } else if (qkey == "corpus.test_speakers") {
      cfg.corpus.n_test_speakers = ParseInt(qkey, val);
    } else if (qkey == "corpus.utts_per_speaker") {
      cfg.corpus.utts_per_speaker = ParseInt(qkey, val);
    } else if (qkey == "corpus.min_dur_ms") {
      cfg.corpus.min_dur_ms = ParseReal(qkey, val);
    } else if (qkey == "corpus.max_dur_ms") {
      cfg.corpus.max_dur_ms = ParseReal(qkey, val);
    } else if (qkey == "corpus.seed") {
      cfg.corpus.master_seed = ParseU64(qkey, val);
    } else if (qkey == "ppg.context") {
      cfg.ppg.context = ParseInt(qkey, val);
    } else if (qkey == "ppg.conv_channels") {
      cfg.ppg.conv_channels = ParseInt(qkey, val);
    } else if (qkey == "ppg.dense_layers") {
      cfg.ppg.dense_layers = ParseInt(qkey, val);
    } else if (qkey == "ppg.dense_units") {
      cfg.ppg.dense_units = ParseInt(qkey, val);
    } else if (qkey == "ppg.max_epochs") {
      cfg.ppg_train.max_epochs = ParseInt(qkey, val);
    } else if (qkey == "ppg.batch_frames") {
      cfg.ppg_train.batch_frames = ParseInt(qkey, val);
    } else if (qkey == "ppg.lr") {
      cfg.ppg_train.lr = ParseReal(qkey, val);
    } else if (qkey == "ppg.clip_norm") {
      cfg.ppg_train.clip_norm = ParseReal(qkey, val);
    } else if (qkey == "ppg.target_accuracy") {
      cfg.ppg_train.target_accuracy = ParseReal(qkey, val);
    } else if (qkey == "ppg.seed") {
      cfg.ppg_train.seed = ParseU64(qkey, val);
    } else if (qkey == "ppg.noise_augment_copies") {
      cfg.noise_augment_copies = ParseInt(qkey, val);
    } else if (qkey == "fap.blstm_layers") {
      cfg.fap.blstm_layers = ParseInt(qkey, val);
    } else if (qkey == "fap.blstm_units") {
      cfg.fap.blstm_units = ParseInt(qkey, val);
    } else if (qkey == "fap.dense_layers") {
      cfg.fap.dense_layers = ParseInt(qkey, val);
    } else if (qkey == "fap.dense_units") {
      cfg.fap.dense_units = ParseInt(qkey, val);
    } else if (qkey == "fap.zoneout") {
      cfg.fap.zoneout = ParseReal(qkey, val);
    } else if (qkey == "fap.use_energy") {
      cfg.fap.use_energy = ParseBool(qkey, val);
    } else if (qkey == "fap.max_epochs") {
      cfg.fap_train.max_epochs = ParseInt(qkey, val);
    } else if (qkey == "fap.lr") {
      cfg.fap_train.lr = ParseReal(qkey, val);
    } else if (qkey == "fap.clip_norm") {
      cfg.fap_train.clip_norm = ParseReal(qkey, val);
    } else if (qkey == "fap.seed") {
      cfg.fap_train.seed = ParseU64(qkey, val);
    } else if (qkey == "eval.n_samples") {
      cfg.eval.n_samples = ParseInt(qkey, val);
    } else if (qkey == "eval.seed") {
      cfg.eval.seed = ParseU64(qkey, val);
    } else {
      throw DataError("config line " + std::to_string(line_no) +
                      ": unknown key '" + qkey + "'");
    }
  }
  cfg.Validate();
  return cfg;
}

RunConfig LoadRunConfig(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("LoadRunConfig: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str());
}

}  // namespace ppgface
