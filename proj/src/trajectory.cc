// src/trajectory.cc

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

#include "ppgface/trajectory.h"

#include <cmath>

namespace ppgface {

namespace {

struct Tap {
  int offset;
  double coef;
};

std::vector<Tap> WindowTaps(const std::vector<double> &w) {
  // Windows span +/-1 around the center.
  PPGFACE_ASSERT(w.size() % 2 == 1 && w.size() <= 3, "WindowTaps: bad window");
  const int half = static_cast<int>(w.size()) / 2;
  std::vector<Tap> taps;
  for (size_t i = 0; i < w.size(); i++)
    if (w[i] != 0.0) taps.push_back({static_cast<int>(i) - half, w[i]});
  return taps;
}

constexpr int kBand = 2;  // semi-bandwidth of W^T D W for radius-1 windows

// Accumulates one stream's contribution to the banded normal equations.
// band(t, d) holds A(t, t+d).
void Accumulate(const std::vector<Tap> &taps, double precision,
                const Eigen::Ref<const Vec> &mu, Mat *band, Vec *rhs) {
  const Eigen::Index T = rhs->size();
  for (Eigen::Index t = 0; t < T; t++) {
    for (const Tap &a : taps) {
      const Eigen::Index qa = t + a.offset;
      if (qa < 0 || qa >= T) continue;
      (*rhs)[qa] += precision * a.coef * mu[t];
      for (const Tap &b : taps) {
        const Eigen::Index qb = t + b.offset;
        if (qb < qa || qb >= T) continue;  // upper triangle only
        (*band)(qa, qb - qa) += precision * a.coef * b.coef;
      }
    }
  }
}

// In-place banded Cholesky A = L L^T followed by the two triangular
// solves. band is the upper-band storage of the SPD matrix.
Vec BandedSolve(Mat band, Vec rhs) {
  const Eigen::Index T = rhs.size();
  // lower(i, d) = L(i, i-d)
  Mat lower = Mat::Zero(T, kBand + 1);
  for (Eigen::Index i = 0; i < T; i++) {
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - kBand); j <= i; j++) {
      double sum = band(j, i - j);  // A(j, i) == A(i, j)
      for (Eigen::Index k = std::max<Eigen::Index>(0, i - kBand); k < j; k++)
        sum -= lower(i, i - k) * lower(j, j - k);
      if (j == i) {
        PPGFACE_ASSERT(sum > 0, "BandedSolve: matrix not positive definite");
        lower(i, 0) = std::sqrt(sum);
      } else {
        lower(i, i - j) = sum / lower(j, 0);
      }
    }
  }
  // L y = rhs
  Vec y(T);
  for (Eigen::Index i = 0; i < T; i++) {
    double sum = rhs[i];
    for (Eigen::Index k = std::max<Eigen::Index>(0, i - kBand); k < i; k++)
      sum -= lower(i, i - k) * y[k];
    y[i] = sum / lower(i, 0);
  }
  // L^T c = y
  Vec c(T);
  for (Eigen::Index i = T - 1; i >= 0; i--) {
    double sum = y[i];
    for (Eigen::Index k = i + 1; k < std::min(T, i + kBand + 1); k++)
      sum -= lower(k, k - i) * c[k];
    c[i] = sum / lower(i, 0);
  }
  return c;
}

void CheckMeans(const Mat &means) {
  PPGFACE_CHECK(means.rows() >= 1, "Mlpg: empty means");
  PPGFACE_CHECK(means.cols() % 3 == 0, "Mlpg: means must stack 3 streams");
}

}  // namespace

GlobalVariance ComputeGlobalVariance(const std::vector<Mat> &targets) {
  Eigen::Index total = 0, dim = -1;
  for (const Mat &m : targets) {
    if (dim < 0) dim = m.cols();
    PPGFACE_CHECK(m.cols() == dim, "ComputeGlobalVariance: ragged targets");
    total += m.rows();
  }
  if (total < 2) throw DataError("TooFewFrames: global variance needs >= 2 frames");

  Vec sum = Vec::Zero(dim), sumsq = Vec::Zero(dim);
  for (const Mat &m : targets)
    for (Eigen::Index t = 0; t < m.rows(); t++) {
      sum += m.row(t).transpose();
      sumsq += m.row(t).array().square().matrix();
    }
  GlobalVariance gv;
  gv.v = ((sumsq - sum.array().square().matrix() / total) / (total - 1))
             .cwiseMax(kVarianceFloor);
  return gv;
}

Mat ApplyMlpgWindows(const Mat &statics, const WindowSet &windows) {
  const Eigen::Index T = statics.rows(), D = statics.cols();
  PPGFACE_CHECK(T >= 1, "ApplyMlpgWindows: empty input");
  Mat out = Mat::Zero(T, 3 * D);
  const std::vector<std::vector<Tap>> taps = {WindowTaps(windows.stat),
                                              WindowTaps(windows.delta),
                                              WindowTaps(windows.accel)};
  for (int s = 0; s < 3; s++) {
    for (Eigen::Index t = 0; t < T; t++)
      for (const Tap &tap : taps[s]) {
        const Eigen::Index q = t + tap.offset;
        if (q < 0 || q >= T) continue;
        out.row(t).segment(s * D, D) += tap.coef * statics.row(q);
      }
  }
  return out;
}

Mat Mlpg(const Mat &means, const GlobalVariance &gv, const WindowSet &windows) {
  CheckMeans(means);
  const Eigen::Index T = means.rows(), D = means.cols() / 3;
  PPGFACE_CHECK(gv.v.size() == 3 * D, "Mlpg: variance dimension mismatch");
  PPGFACE_CHECK((gv.v.array() > 0).all(), "Mlpg: variances must be positive");

  const std::vector<std::vector<Tap>> taps = {WindowTaps(windows.stat),
                                              WindowTaps(windows.delta),
                                              WindowTaps(windows.accel)};
  Mat out(T, D);
  for (Eigen::Index d = 0; d < D; d++) {
    Mat band = Mat::Zero(T, kBand + 1);
    Vec rhs = Vec::Zero(T);
    for (int s = 0; s < 3; s++)
      Accumulate(taps[s], 1.0 / gv.v[s * D + d], means.col(s * D + d), &band,
                 &rhs);
    out.col(d) = BandedSolve(std::move(band), std::move(rhs));
  }
  return out;
}

Mat MlpgDense(const Mat &means, const GlobalVariance &gv,
              const WindowSet &windows) {
  CheckMeans(means);
  const Eigen::Index T = means.rows(), D = means.cols() / 3;
  PPGFACE_CHECK(gv.v.size() == 3 * D, "MlpgDense: variance dimension mismatch");

  const std::vector<std::vector<double>> wins = {windows.stat, windows.delta,
                                                 windows.accel};
  Mat out(T, D);
  for (Eigen::Index d = 0; d < D; d++) {
    Mat W = Mat::Zero(3 * T, T);
    Vec mu(3 * T), prec(3 * T);
    for (int s = 0; s < 3; s++) {
      const int half = static_cast<int>(wins[s].size()) / 2;
      for (Eigen::Index t = 0; t < T; t++) {
        for (size_t i = 0; i < wins[s].size(); i++) {
          const Eigen::Index q = t + static_cast<Eigen::Index>(i) - half;
          if (q >= 0 && q < T) W(s * T + t, q) = wins[s][i];
        }
        mu[s * T + t] = means(t, s * D + d);
        prec[s * T + t] = 1.0 / gv.v[s * D + d];
      }
    }
    const Mat A = W.transpose() * prec.asDiagonal() * W;
    const Vec b = W.transpose() * (prec.asDiagonal() * mu);
    out.col(d) = A.ldlt().solve(b);
  }
  return out;
}

FeatureMatrix SlidingWindowSmooth(const ChunkPredictor &predict,
                                  const FeatureMatrix &input, int window) {
  PPGFACE_CHECK(window >= 1, "SlidingWindowSmooth: window must be positive");
  const Eigen::Index T = input.NumFrames();
  PPGFACE_CHECK(T >= 1, "SlidingWindowSmooth: empty input");

  Mat acc;
  Vec count = Vec::Zero(T);
  const Eigen::Index last_start = std::max<Eigen::Index>(0, T - window);
  for (Eigen::Index s = 0; s <= last_start; s++) {
    const Eigen::Index len = std::min<Eigen::Index>(window, T - s);
    const Mat chunk = predict(input.data.middleRows(s, len));
    PPGFACE_CHECK(chunk.rows() == len,
                  "SlidingWindowSmooth: predictor changed the frame count");
    if (acc.size() == 0) acc = Mat::Zero(T, chunk.cols());
    acc.middleRows(s, len) += chunk;
    count.segment(s, len).array() += 1.0;
  }
  FeatureMatrix out;
  out.kind = FeatureKind::kFap;
  out.frame_shift_ms = input.frame_shift_ms;
  out.data = acc.array().colwise() / count.array();
  return out;
}

}  // namespace ppgface
