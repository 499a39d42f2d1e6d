// include/ppgface/trajectory.h

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

#ifndef PPGFACE_TRAJECTORY_H_
#define PPGFACE_TRAJECTORY_H_

#include <functional>
#include <vector>

#include "ppgface/common.h"
#include "ppgface/features.h"

namespace ppgface {

constexpr int kFapDim = 32;

/// Radius-1 MLPG windows: static [1], delta [-0.5, 0, 0.5],
/// acceleration [1, -2, 1], all centered at offset 0. Taps falling
/// outside [0, T) are dropped (zero padding).
struct WindowSet {
  std::vector<double> stat{1.0};
  std::vector<double> delta{-0.5, 0.0, 0.5};
  std::vector<double> accel{1.0, -2.0, 1.0};
};

/// Per-column variance of the stacked [static; delta; accel] training
/// targets, floored so the MLPG normal equations stay SPD.
struct GlobalVariance {
  Vec v;  // 3 * kFapDim positive reals
};

constexpr double kVarianceFloor = 1e-8;

/// Unbiased per-column variance pooled over the frames of all targets.
/// Throws DataError("TooFewFrames...") below 2 total frames.
GlobalVariance ComputeGlobalVariance(const std::vector<Mat> &targets);

/// Applies the radius-1 window set to a static trajectory (T x D),
/// returning T x 3D [static; delta; accel] means with the same
/// zero-padded boundary convention MLPG uses. Training targets built
/// this way make MLPG recovery exact.
Mat ApplyMlpgWindows(const Mat &statics, const WindowSet &windows = WindowSet());

/// Maximum-likelihood parameter generation: per static dimension solves
/// (W^T D W) c = W^T D mu with D = diag(1/gv) via banded Cholesky
/// (semi-bandwidth 2). means is T x 3D; the result is the T x D statics.
Mat Mlpg(const Mat &means, const GlobalVariance &gv,
         const WindowSet &windows = WindowSet());

/// Dense reference solve of the same normal equations. Test oracle and
/// debugging aid; O(T^3).
Mat MlpgDense(const Mat &means, const GlobalVariance &gv,
              const WindowSet &windows = WindowSet());

/// Sliding-window regression smoothing: predict on every window of
/// `window` frames (stride 1; a single truncated window when T < window)
/// and average each frame over all windows covering it.
using ChunkPredictor = std::function<Mat(const Mat &)>;
FeatureMatrix SlidingWindowSmooth(const ChunkPredictor &predict,
                                  const FeatureMatrix &input, int window = 15);

}  // namespace ppgface

#endif  // PPGFACE_TRAJECTORY_H_
