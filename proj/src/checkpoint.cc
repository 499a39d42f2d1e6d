// src/checkpoint.cc

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

#include "ppgface/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

namespace ppgface {

namespace {

static_assert(std::endian::native == std::endian::little,
              "NNCK I/O assumes a little-endian host");

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

void PutString(std::ostream &os, const std::string &s) {
  Put<uint32_t>(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), s.size());
}

std::string GetString(std::istream &is) {
  const uint32_t len = Get<uint32_t>(is);
  if (len > (1u << 20)) throw DataError("NNCK: implausible string length");
  std::string s(len, '\0');
  is.read(s.data(), len);
  return s;
}

constexpr char kMagic[4] = {'N', 'N', 'C', 'K'};

}  // namespace

const Mat &Checkpoint::Tensor(const std::string &name) const {
  for (const auto &[n, t] : tensors)
    if (n == name) return t;
  throw DataError("NNCK: missing tensor " + name);
}

const std::string &Checkpoint::Header(const std::string &key) const {
  auto it = header.find(key);
  if (it == header.end()) throw DataError("NNCK: missing header key " + key);
  return it->second;
}

void WriteNnck(const std::string &path, const Checkpoint &ck) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("WriteNnck: cannot open " + path);
  os.write(kMagic, 4);
  Put<uint32_t>(os, 1);
  Put<uint32_t>(os, static_cast<uint32_t>(ck.header.size()));
  for (const auto &[k, v] : ck.header) {  // std::map iterates sorted
    PutString(os, k);
    PutString(os, v);
  }
  Put<uint32_t>(os, static_cast<uint32_t>(ck.tensors.size()));
  for (const auto &[name, t] : ck.tensors) {
    PutString(os, name);
    Put<uint32_t>(os, static_cast<uint32_t>(t.rows()));
    Put<uint32_t>(os, static_cast<uint32_t>(t.cols()));
    std::vector<float> buf(t.size());
    for (Eigen::Index i = 0; i < t.size(); i++)
      buf[i] = static_cast<float>(t.data()[i]);
    os.write(reinterpret_cast<const char *>(buf.data()), buf.size() * 4);
  }
  if (!os) throw IoError("WriteNnck: write failed: " + path);
}

Checkpoint ReadNnck(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("ReadNnck: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("ReadNnck: bad magic in " + path);
  if (Get<uint32_t>(is) != 1)
    throw DataError("ReadNnck: unsupported version in " + path);

  Checkpoint ck;
  const uint32_t n_keys = Get<uint32_t>(is);
  for (uint32_t i = 0; i < n_keys; i++) {
    std::string k = GetString(is);
    ck.header[k] = GetString(is);
  }
  const uint32_t n_tensors = Get<uint32_t>(is);
  for (uint32_t i = 0; i < n_tensors; i++) {
    std::string name = GetString(is);
    const uint32_t rows = Get<uint32_t>(is);
    const uint32_t cols = Get<uint32_t>(is);
    Mat t(rows, cols);
    std::vector<float> buf(static_cast<size_t>(rows) * cols);
    is.read(reinterpret_cast<char *>(buf.data()), buf.size() * 4);
    if (!is) throw DataError("ReadNnck: truncated tensor in " + path);
    for (size_t j = 0; j < buf.size(); j++) t.data()[j] = buf[j];
    ck.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ck;
}

}  // namespace ppgface
