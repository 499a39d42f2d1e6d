// include/ppgface/fmtx.h

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

#ifndef PPGFACE_FMTX_H_
#define PPGFACE_FMTX_H_

#include <cstdint>
#include <optional>
#include <string>

#include "ppgface/features.h"

namespace ppgface {

// "FMTX" binary matrix file:
//   magic 'F' 'M' 'T' 'X', u32 version=1, u64 rows, u64 cols,
//   u8 kind tag, f64 frame_shift_ms, rows*cols LE f32 row-major.
// For kind=ppg an 8-byte phoneme-space checksum trailer follows the data.

void WriteFmtx(const std::string &path, const FeatureMatrix &m,
               std::optional<uint64_t> space_checksum = std::nullopt);

FeatureMatrix ReadFmtx(const std::string &path,
                       uint64_t *space_checksum = nullptr);

}  // namespace ppgface

#endif  // PPGFACE_FMTX_H_
