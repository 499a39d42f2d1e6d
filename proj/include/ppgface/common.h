// include/ppgface/common.h

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

#ifndef PPGFACE_COMMON_H_
#define PPGFACE_COMMON_H_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ppgface {

// Row-major so flat buffers (file formats, im2col) map directly.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Error taxonomy maps onto CLI exit codes: UsageError -> 1,
// DataError -> 2, InternalError -> 3.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string &msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string &msg) : std::runtime_error(msg) {}
};

class ShapeMismatch : public DataError {
 public:
  explicit ShapeMismatch(const std::string &msg) : DataError(msg) {}
};

class SpaceMismatch : public DataError {
 public:
  explicit SpaceMismatch(const std::string &msg) : DataError(msg) {}
};

class LengthMismatch : public DataError {
 public:
  explicit LengthMismatch(const std::string &msg) : DataError(msg) {}
};

class IoError : public DataError {
 public:
  explicit IoError(const std::string &msg) : DataError(msg) {}
};

#define PPGFACE_CHECK(cond, msg)                         \
  do {                                                   \
    if (!(cond)) throw ::ppgface::DataError(msg);        \
  } while (0)

#define PPGFACE_ASSERT(cond, msg)                        \
  do {                                                   \
    if (!(cond)) throw ::ppgface::InternalError(msg);    \
  } while (0)

// FNV-1a 64-bit, used for phoneme-space checksums and seed derivation.
inline uint64_t Fnv1a64(const void *data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < n; i++) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t Fnv1a64(const std::string &s, uint64_t h = 0xcbf29ce484222325ULL) {
  return Fnv1a64(s.data(), s.size(), h);
}

}  // namespace ppgface

#endif  // PPGFACE_COMMON_H_
