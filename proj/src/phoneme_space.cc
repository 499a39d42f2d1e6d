// src/phoneme_space.cc

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

#include "ppgface/phoneme_space.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ppgface {

PhonemeSpace PhonemeSpace::Build(const std::vector<Inventory> &inventories) {
  PhonemeSpace space;
  std::set<std::string> languages;
  for (const auto &[lang, symbols] : inventories) {
    PPGFACE_CHECK(!lang.empty(), "PhonemeSpace: empty language_id");
    PPGFACE_CHECK(languages.insert(lang).second,
                  "LanguageExists: duplicate language " + lang);
    std::set<std::string> seen;
    for (const auto &sym : symbols) {
      PPGFACE_CHECK(!sym.empty(), "PhonemeSpace: empty symbol");
      if (!seen.insert(sym).second)
        throw DataError("DuplicateSymbol: " + lang + "/" + sym);
      space.units_.push_back({lang, sym});
    }
  }
  space.Rehash();
  return space;
}

PhonemeSpace PhonemeSpace::Extend(const Inventory &inventory) const {
  if (HasLanguage(inventory.first))
    throw DataError("LanguageExists: " + inventory.first);
  PhonemeSpace space = *this;
  std::set<std::string> seen;
  for (const auto &sym : inventory.second) {
    if (!seen.insert(sym).second)
      throw DataError("DuplicateSymbol: " + inventory.first + "/" + sym);
    space.units_.push_back({inventory.first, sym});
  }
  space.Rehash();
  return space;
}

size_t PhonemeSpace::IndexOf(const std::string &language_id,
                             const std::string &symbol) const {
  for (size_t i = 0; i < units_.size(); i++)
    if (units_[i].language_id == language_id && units_[i].symbol == symbol)
      return i;
  throw DataError("UnknownUnit: " + language_id + "/" + symbol);
}

bool PhonemeSpace::Contains(const std::string &language_id,
                            const std::string &symbol) const {
  for (const auto &u : units_)
    if (u.language_id == language_id && u.symbol == symbol) return true;
  return false;
}

bool PhonemeSpace::HasLanguage(const std::string &language_id) const {
  for (const auto &u : units_)
    if (u.language_id == language_id) return true;
  return false;
}

std::string PhonemeSpace::Serialize() const {
  std::string out;
  for (const auto &u : units_) {
    out += u.language_id;
    out += '\t';
    out += u.symbol;
    out += '\n';
  }
  return out;
}

PhonemeSpace PhonemeSpace::Deserialize(const std::string &text) {
  PhonemeSpace space;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    PPGFACE_CHECK(tab != std::string::npos,
                  "PhonemeSpace: malformed line: " + line);
    space.units_.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  space.Rehash();
  return space;
}

void PhonemeSpace::Save(const std::string &path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("PhonemeSpace::Save: cannot open " + path);
  os << Serialize();
  if (!os) throw IoError("PhonemeSpace::Save: write failed: " + path);
}

PhonemeSpace PhonemeSpace::Load(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("PhonemeSpace::Load: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return Deserialize(ss.str());
}

void PhonemeSpace::Rehash() { checksum_ = Fnv1a64(Serialize()); }

void Ppg::Validate(const PhonemeSpace *space) const {
  if (space) {
    PPGFACE_CHECK(matrix.cols() == static_cast<Eigen::Index>(space->size()),
                  "Ppg: column count does not match phoneme space size");
    if (space_checksum != space->checksum())
      throw SpaceMismatch("Ppg: space checksum mismatch");
  }
  for (Eigen::Index t = 0; t < matrix.rows(); t++) {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < matrix.cols(); p++) {
      const double v = matrix(t, p);
      PPGFACE_CHECK(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                    "Ppg: entry outside [0,1] at row " + std::to_string(t));
      sum += v;
    }
    PPGFACE_CHECK(std::abs(sum - 1.0) <= 1e-5,
                  "Ppg: row " + std::to_string(t) + " sums to " +
                      std::to_string(sum));
  }
}

}  // namespace ppgface
