// include/ppgface/checkpoint.h

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

#ifndef PPGFACE_CHECKPOINT_H_
#define PPGFACE_CHECKPOINT_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ppgface/common.h"

namespace ppgface {

// "NNCK" model checkpoint:
//   magic 'N' 'N' 'C' 'K', u32 version=1,
//   u32 n_keys, n_keys x (u32 len + bytes key, u32 len + bytes value),
//   u32 n_tensors, n_tensors x (u32 len + bytes name, u32 rows, u32 cols,
//   rows*cols LE f32 row-major).
// Header keys are written in sorted order so round-trips are bit-exact.

struct Checkpoint {
  std::map<std::string, std::string> header;
  std::vector<std::pair<std::string, Mat>> tensors;

  const Mat &Tensor(const std::string &name) const;
  const std::string &Header(const std::string &key) const;
};

void WriteNnck(const std::string &path, const Checkpoint &ck);
Checkpoint ReadNnck(const std::string &path);

}  // namespace ppgface

#endif  // PPGFACE_CHECKPOINT_H_
