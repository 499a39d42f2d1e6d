// include/ppgface/phoneme_space.h

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

#ifndef PPGFACE_PHONEME_SPACE_H_
#define PPGFACE_PHONEME_SPACE_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppgface/common.h"

namespace ppgface {

struct PhonemeUnit {
  std::string language_id;
  std::string symbol;

  bool operator==(const PhonemeUnit &) const = default;
};

using Inventory = std::pair<std::string, std::vector<std::string>>;

/// Ordered union of per-language phoneme inventories. Immutable after
/// construction; extension returns a new space. The checksum is FNV-1a64
/// over the canonical text serialization, so it changes exactly when the
/// ordered unit list changes.
class PhonemeSpace {
 public:
  PhonemeSpace() = default;

  static PhonemeSpace Build(const std::vector<Inventory> &inventories);

  /// Appends a new language's units; existing indices are unchanged.
  /// Throws DataError("LanguageExists...") if the language is present.
  PhonemeSpace Extend(const Inventory &inventory) const;

  /// Stable column index of a unit; throws DataError("UnknownUnit...").
  size_t IndexOf(const std::string &language_id, const std::string &symbol) const;

  bool Contains(const std::string &language_id, const std::string &symbol) const;
  bool HasLanguage(const std::string &language_id) const;

  size_t size() const { return units_.size(); }
  const std::vector<PhonemeUnit> &units() const { return units_; }
  uint64_t checksum() const { return checksum_; }

  /// Canonical serialization: one `language<TAB>symbol` line per unit.
  std::string Serialize() const;
  static PhonemeSpace Deserialize(const std::string &text);

  void Save(const std::string &path) const;
  static PhonemeSpace Load(const std::string &path);

 private:
  void Rehash();

  std::vector<PhonemeUnit> units_;
  uint64_t checksum_ = 0;
};

/// Row-stochastic posteriorgram over a phoneme space.
struct Ppg {
  Mat matrix;  // T x P
  uint64_t space_checksum = 0;

  /// Throws DataError unless every entry is in [0,1] and every row sums
  /// to 1 within 1e-5 (and matches the given space size, if provided).
  void Validate(const PhonemeSpace *space = nullptr) const;
};

}  // namespace ppgface

#endif  // PPGFACE_PHONEME_SPACE_H_
