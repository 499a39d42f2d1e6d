// src/fmtx.cc

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

#include "ppgface/fmtx.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace ppgface {

namespace {

// Little-endian plain-old-data writes. Host is assumed LE (checked once).
static_assert(std::endian::native == std::endian::little,
              "FMTX I/O assumes a little-endian host");

template <typename T>
void Put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream &is) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  return v;
}

constexpr char kMagic[4] = {0x46, 0x4D, 0x54, 0x58};  // "FMTX"

}  // namespace

void WriteFmtx(const std::string &path, const FeatureMatrix &m,
               std::optional<uint64_t> space_checksum) {
  if (m.kind == FeatureKind::kPpg && !space_checksum)
    throw DataError("WriteFmtx: kind=ppg requires a space checksum");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("WriteFmtx: cannot open " + path);
  os.write(kMagic, 4);
  Put<uint32_t>(os, 1);
  Put<uint64_t>(os, static_cast<uint64_t>(m.data.rows()));
  Put<uint64_t>(os, static_cast<uint64_t>(m.data.cols()));
  Put<uint8_t>(os, static_cast<uint8_t>(m.kind));
  Put<double>(os, m.frame_shift_ms);
  std::vector<float> buf(m.data.size());
  for (Eigen::Index i = 0; i < m.data.size(); i++)
    buf[i] = static_cast<float>(m.data.data()[i]);  // row-major flat
  os.write(reinterpret_cast<const char *>(buf.data()), buf.size() * 4);
  if (m.kind == FeatureKind::kPpg) Put<uint64_t>(os, *space_checksum);
  if (!os) throw IoError("WriteFmtx: write failed: " + path);
}

FeatureMatrix ReadFmtx(const std::string &path, uint64_t *space_checksum) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("ReadFmtx: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("ReadFmtx: bad magic in " + path);
  const uint32_t version = Get<uint32_t>(is);
  if (version != 1) throw DataError("ReadFmtx: unsupported version in " + path);
  const uint64_t rows = Get<uint64_t>(is);
  const uint64_t cols = Get<uint64_t>(is);
  const uint8_t kind = Get<uint8_t>(is);
  if (kind > 4) throw DataError("ReadFmtx: unknown kind tag in " + path);
  const double shift = Get<double>(is);

  FeatureMatrix m;
  m.kind = static_cast<FeatureKind>(kind);
  m.frame_shift_ms = shift;
  m.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<float> buf(rows * cols);
  is.read(reinterpret_cast<char *>(buf.data()), buf.size() * 4);
  if (!is) throw DataError("ReadFmtx: truncated data in " + path);
  for (size_t i = 0; i < buf.size(); i++) m.data.data()[i] = buf[i];

  if (m.kind == FeatureKind::kPpg) {
    const uint64_t ck = Get<uint64_t>(is);
    if (!is) throw DataError("ReadFmtx: missing ppg checksum trailer in " + path);
    if (space_checksum) *space_checksum = ck;
  } else if (space_checksum) {
    *space_checksum = 0;
  }
  return m;
}

}  // namespace ppgface
