// include/ppgface/nnet.h

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

#ifndef PPGFACE_NNET_H_
#define PPGFACE_NNET_H_

#include <functional>
#include <string>
#include <vector>

#include "ppgface/common.h"
#include "ppgface/rng.h"

namespace ppgface {
namespace nnet {

enum class Activation { kLinear, kTanh, kRelu };

// Glorot uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)).
Mat GlorotUniform(Eigen::Index rows, Eigen::Index cols, double fan_in,
                  double fan_out, RngStream &rng);

// ----------------------------------------------------------------------
// Dense: y = act(x W^T + b), x is T x I, W is O x I, b is 1 x O.

struct Dense {
  Mat W;
  Mat b;
  Activation act = Activation::kLinear;

  static Dense Create(Eigen::Index in, Eigen::Index out, Activation act,
                      RngStream &rng);
  Dense ZeroLike() const;
  void Collect(std::vector<Mat *> &out) {
    out.push_back(&W);
    out.push_back(&b);
  }
};

struct DenseCache {
  Mat x;
  Mat y;  // post-activation
};

Mat DenseForward(const Dense &p, const Mat &x, DenseCache *cache = nullptr);
// Accumulates parameter grads into *grad, returns dL/dx.
Mat DenseBackward(const Dense &p, const DenseCache &cache, const Mat &dy,
                  Dense *grad);

// ----------------------------------------------------------------------
// Conv1d along the time axis, "same" zero padding, linear activation
// (nonlinearity is the caller's). Kernel stored as C_out x (k * C_in):
// column block j holds tap offset j - k/2.

struct Conv1d {
  Mat K;  // C_out x (k * C_in)
  Mat b;  // 1 x C_out
  int kernel = 0;
  int in_channels = 0;

  static Conv1d Create(int in_channels, int out_channels, int kernel,
                       RngStream &rng);
  Conv1d ZeroLike() const;
  void Collect(std::vector<Mat *> &out) {
    out.push_back(&K);
    out.push_back(&b);
  }
};

struct Conv1dCache {
  Mat cols;  // T x (k * C_in) im2col matrix
};

// Zero-padded context windows of x (T x C_in) as rows: T x (k * C_in).
Mat Im2Col(const Mat &x, int kernel);

Mat Conv1dForward(const Conv1d &p, const Mat &x, Conv1dCache *cache = nullptr);
Mat Conv1dBackward(const Conv1d &p, const Conv1dCache &cache, const Mat &dy,
                   Conv1d *grad);

// ----------------------------------------------------------------------
// LSTM with zoneout. Gate order in the 4H axis: input, forget, cell,
// output. Zoneout masks are carry probabilities: state_t =
// m * state_{t-1} + (1 - m) * candidate_t. Training draws Bernoulli
// masks; inference uses the constant expectation m = rate.

struct LstmCell {
  Mat W_x;  // 4H x I
  Mat W_h;  // 4H x H
  Mat b;    // 1 x 4H
  double zoneout_c = 0.0;
  double zoneout_h = 0.0;

  Eigen::Index hidden() const { return W_h.cols(); }
  Eigen::Index input() const { return W_x.cols(); }

  static LstmCell Create(Eigen::Index in, Eigen::Index hidden,
                         double zoneout_c, double zoneout_h, RngStream &rng);
  LstmCell ZeroLike() const;
  void Collect(std::vector<Mat *> &out) {
    out.push_back(&W_x);
    out.push_back(&W_h);
    out.push_back(&b);
  }
};

// Single step; masks are row vectors of carry weights in [0,1].
void LstmStep(const LstmCell &p, const Eigen::RowVectorXd &x_t,
              const Eigen::RowVectorXd &h_prev, const Eigen::RowVectorXd &c_prev,
              const Eigen::RowVectorXd &mask_c, const Eigen::RowVectorXd &mask_h,
              Eigen::RowVectorXd *h_t, Eigen::RowVectorXd *c_t);

struct LstmSeqCache {
  Mat x;                 // T x I
  Mat gates;             // T x 4H, post-activation
  Mat c_tilde, h_tilde;  // T x H candidates
  Mat c, h;              // T x H states after zoneout
  Mat mask_c, mask_h;    // T x H carry weights
};

// Full-sequence forward with zero initial state. In training mode masks
// are drawn from rng (required); otherwise the expectation blend is used.
Mat LstmForward(const LstmCell &p, const Mat &x, bool training, RngStream *rng,
                LstmSeqCache *cache = nullptr);

// BPTT with the recorded masks. Accumulates into *grad, returns dL/dx.
Mat LstmBackward(const LstmCell &p, const LstmSeqCache &cache, const Mat &dh,
                 LstmCell *grad);

// ----------------------------------------------------------------------
// Bidirectional layer: [h_fwd ; h_bwd] per frame, both zero-initialized.

struct Blstm {
  LstmCell fwd, bwd;

  static Blstm Create(Eigen::Index in, Eigen::Index hidden, double zoneout_c,
                      double zoneout_h, RngStream &rng);
  Blstm ZeroLike() const;
  void Collect(std::vector<Mat *> &out) {
    fwd.Collect(out);
    bwd.Collect(out);
  }
};

struct BlstmCache {
  LstmSeqCache fwd, bwd;  // bwd caches operate on the reversed sequence
};

Mat BlstmForward(const Blstm &p, const Mat &x, bool training, RngStream *rng,
                 BlstmCache *cache = nullptr);
Mat BlstmBackward(const Blstm &p, const BlstmCache &cache, const Mat &dy,
                  Blstm *grad);

// ----------------------------------------------------------------------
// Losses. Both return the mean loss and write the gradient of that mean.

double SoftmaxXent(const Mat &logits, const std::vector<int> &labels,
                   Mat *dlogits);
Mat Softmax(const Mat &logits);
double MseLoss(const Mat &pred, const Mat &target, Mat *dpred);

// ----------------------------------------------------------------------
// Adam with bias correction.

struct AdamState {
  std::vector<Mat> m, v;
  int64_t step = 0;
};

void AdamStep(const std::vector<Mat *> &params,
              const std::vector<const Mat *> &grads, AdamState *state,
              double lr, double beta1 = 0.9, double beta2 = 0.999,
              double eps = 1e-8);

// Scales grads so their global L2 norm is at most max_norm; returns the
// pre-clip norm.
double ClipGlobalNorm(const std::vector<Mat *> &grads, double max_norm);

// ----------------------------------------------------------------------
// Central finite-difference check. loss_fn re-evaluates the loss at the
// current parameter values; analytic holds dL/dparam in matching order.
// Returns the max relative error over all checked coordinates
// (|fd - an| / max(1e-8, |fd| + |an|)).

double GradCheck(const std::function<double()> &loss_fn,
                 const std::vector<Mat *> &params,
                 const std::vector<Mat> &analytic, double eps = 1e-5);

}  // namespace nnet
}  // namespace ppgface

#endif  // PPGFACE_NNET_H_
