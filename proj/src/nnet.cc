// src/nnet.cc

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

#include "ppgface/nnet.h"

#include <cmath>

namespace ppgface {
namespace nnet {

namespace {

Mat Activate(const Mat &pre, Activation act) {
  switch (act) {
    case Activation::kLinear: return pre;
    case Activation::kTanh: return pre.array().tanh().matrix();
    case Activation::kRelu: return pre.cwiseMax(0.0);
  }
  throw InternalError("Activate: bad activation");
}

// dL/dpre from dL/dy and the post-activation output.
Mat ActivateBackward(const Mat &dy, const Mat &y, Activation act) {
  switch (act) {
    case Activation::kLinear: return dy;
    case Activation::kTanh:
      return (dy.array() * (1.0 - y.array().square())).matrix();
    case Activation::kRelu:
      return (dy.array() * (y.array() > 0.0).cast<double>()).matrix();
  }
  throw InternalError("ActivateBackward: bad activation");
}

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Mat GlorotUniform(Eigen::Index rows, Eigen::Index cols, double fan_in,
                  double fan_out, RngStream &rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; i++)
    for (Eigen::Index j = 0; j < cols; j++) m(i, j) = rng.Uniform(-a, a);
  return m;
}

// ------------------------------- Dense --------------------------------

Dense Dense::Create(Eigen::Index in, Eigen::Index out, Activation act,
                    RngStream &rng) {
  Dense d;
  d.W = GlorotUniform(out, in, in, out, rng);
  d.b = Mat::Zero(1, out);
  d.act = act;
  return d;
}

Dense Dense::ZeroLike() const {
  Dense d;
  d.W = Mat::Zero(W.rows(), W.cols());
  d.b = Mat::Zero(1, b.cols());
  d.act = act;
  return d;
}

Mat DenseForward(const Dense &p, const Mat &x, DenseCache *cache) {
  if (x.cols() != p.W.cols())
    throw ShapeMismatch("DenseForward: input dim " + std::to_string(x.cols()) +
                        " != " + std::to_string(p.W.cols()));
  Mat y = x * p.W.transpose();
  y.rowwise() += p.b.row(0);
  y = Activate(y, p.act);
  if (cache) {
    cache->x = x;
    cache->y = y;
  }
  return y;
}

Mat DenseBackward(const Dense &p, const DenseCache &cache, const Mat &dy,
                  Dense *grad) {
  if (dy.rows() != cache.x.rows() || dy.cols() != p.W.rows())
    throw ShapeMismatch("DenseBackward: bad dy shape");
  const Mat dpre = ActivateBackward(dy, cache.y, p.act);
  grad->W.noalias() += dpre.transpose() * cache.x;
  grad->b.row(0) += dpre.colwise().sum();
  return dpre * p.W;
}

// ------------------------------- Conv1d -------------------------------

Conv1d Conv1d::Create(int in_channels, int out_channels, int kernel,
                      RngStream &rng) {
  PPGFACE_CHECK(kernel % 2 == 1, "EvenKernel: conv1d kernel must be odd");
  Conv1d c;
  c.kernel = kernel;
  c.in_channels = in_channels;
  const double fan_in = static_cast<double>(in_channels) * kernel;
  c.K = GlorotUniform(out_channels, kernel * in_channels, fan_in, out_channels,
                      rng);
  c.b = Mat::Zero(1, out_channels);
  return c;
}

Conv1d Conv1d::ZeroLike() const {
  Conv1d c;
  c.kernel = kernel;
  c.in_channels = in_channels;
  c.K = Mat::Zero(K.rows(), K.cols());
  c.b = Mat::Zero(1, b.cols());
  return c;
}

Mat Im2Col(const Mat &x, int kernel) {
  PPGFACE_CHECK(kernel % 2 == 1, "EvenKernel: kernel must be odd");
  const Eigen::Index T = x.rows(), C = x.cols();
  const int half = kernel / 2;
  Mat cols = Mat::Zero(T, static_cast<Eigen::Index>(kernel) * C);
  for (int j = 0; j < kernel; j++) {
    const int off = j - half;
    const Eigen::Index t_lo = std::max<Eigen::Index>(0, -off);
    const Eigen::Index t_hi = std::min(T, T - off);
    if (t_lo >= t_hi) continue;
    cols.block(t_lo, static_cast<Eigen::Index>(j) * C, t_hi - t_lo, C) =
        x.block(t_lo + off, 0, t_hi - t_lo, C);
  }
  return cols;
}

Mat Conv1dForward(const Conv1d &p, const Mat &x, Conv1dCache *cache) {
  if (x.cols() != p.in_channels)
    throw ShapeMismatch("Conv1dForward: channel mismatch");
  Mat cols = Im2Col(x, p.kernel);
  Mat y = cols * p.K.transpose();
  y.rowwise() += p.b.row(0);
  if (cache) cache->cols = std::move(cols);
  return y;
}

Mat Conv1dBackward(const Conv1d &p, const Conv1dCache &cache, const Mat &dy,
                   Conv1d *grad) {
  if (dy.cols() != p.K.rows()) throw ShapeMismatch("Conv1dBackward: bad dy");
  grad->K.noalias() += dy.transpose() * cache.cols;
  grad->b.row(0) += dy.colwise().sum();
  const Mat dcols = dy * p.K;  // T x (k*C_in)
  // col2im: scatter tap blocks back onto the time axis.
  const Eigen::Index T = dy.rows(), C = p.in_channels;
  const int half = p.kernel / 2;
  Mat dx = Mat::Zero(T, C);
  for (int j = 0; j < p.kernel; j++) {
    const int off = j - half;
    const Eigen::Index t_lo = std::max<Eigen::Index>(0, -off);
    const Eigen::Index t_hi = std::min(T, T - off);
    if (t_lo >= t_hi) continue;
    dx.block(t_lo + off, 0, t_hi - t_lo, C) +=
        dcols.block(t_lo, static_cast<Eigen::Index>(j) * C, t_hi - t_lo, C);
  }
  return dx;
}

// -------------------------------- LSTM --------------------------------

LstmCell LstmCell::Create(Eigen::Index in, Eigen::Index hidden,
                          double zoneout_c, double zoneout_h, RngStream &rng) {
  PPGFACE_CHECK(zoneout_c >= 0 && zoneout_c <= 1 && zoneout_h >= 0 &&
                    zoneout_h <= 1,
                "LstmCell: zoneout rates must be in [0,1]");
  LstmCell p;
  p.W_x = GlorotUniform(4 * hidden, in, in + hidden, hidden, rng);
  p.W_h = GlorotUniform(4 * hidden, hidden, in + hidden, hidden, rng);
  p.b = Mat::Zero(1, 4 * hidden);
  p.b.block(0, hidden, 1, hidden).setConstant(1.0);  // forget-gate bias
  p.zoneout_c = zoneout_c;
  p.zoneout_h = zoneout_h;
  return p;
}

LstmCell LstmCell::ZeroLike() const {
  LstmCell p;
  p.W_x = Mat::Zero(W_x.rows(), W_x.cols());
  p.W_h = Mat::Zero(W_h.rows(), W_h.cols());
  p.b = Mat::Zero(1, b.cols());
  p.zoneout_c = zoneout_c;
  p.zoneout_h = zoneout_h;
  return p;
}

void LstmStep(const LstmCell &p, const Eigen::RowVectorXd &x_t,
              const Eigen::RowVectorXd &h_prev, const Eigen::RowVectorXd &c_prev,
              const Eigen::RowVectorXd &mask_c, const Eigen::RowVectorXd &mask_h,
              Eigen::RowVectorXd *h_t, Eigen::RowVectorXd *c_t) {
  const Eigen::Index H = p.hidden();
  if (x_t.cols() != p.input() || h_prev.cols() != H || c_prev.cols() != H)
    throw ShapeMismatch("LstmStep: dimension mismatch");
  Eigen::RowVectorXd pre =
      x_t * p.W_x.transpose() + h_prev * p.W_h.transpose() + p.b.row(0);
  Eigen::RowVectorXd c_tilde(H), h_tilde(H);
  c_t->resize(H);
  h_t->resize(H);
  for (Eigen::Index u = 0; u < H; u++) {
    const double i = Sigmoid(pre[u]);
    const double f = Sigmoid(pre[H + u]);
    const double g = std::tanh(pre[2 * H + u]);
    const double o = Sigmoid(pre[3 * H + u]);
    c_tilde[u] = f * c_prev[u] + i * g;
    (*c_t)[u] = mask_c[u] * c_prev[u] + (1.0 - mask_c[u]) * c_tilde[u];
    h_tilde[u] = o * std::tanh((*c_t)[u]);
    (*h_t)[u] = mask_h[u] * h_prev[u] + (1.0 - mask_h[u]) * h_tilde[u];
  }
}

Mat LstmForward(const LstmCell &p, const Mat &x, bool training, RngStream *rng,
                LstmSeqCache *cache) {
  const Eigen::Index T = x.rows(), H = p.hidden();
  if (x.cols() != p.input()) throw ShapeMismatch("LstmForward: input dim");
  PPGFACE_CHECK(!training || rng != nullptr,
                "LstmForward: training mode needs an rng for zoneout masks");

  // Input projections for the whole sequence in one GEMM.
  Mat xp = x * p.W_x.transpose();
  xp.rowwise() += p.b.row(0);

  Mat gates(T, 4 * H), c_tilde(T, H), h_tilde(T, H), c(T, H), h(T, H);
  Mat mask_c(T, H), mask_h(T, H);
  if (training) {
    for (Eigen::Index t = 0; t < T; t++)
      for (Eigen::Index u = 0; u < H; u++) {
        mask_c(t, u) = rng->Bernoulli(p.zoneout_c) ? 1.0 : 0.0;
        mask_h(t, u) = rng->Bernoulli(p.zoneout_h) ? 1.0 : 0.0;
      }
  } else {
    mask_c.setConstant(p.zoneout_c);
    mask_h.setConstant(p.zoneout_h);
  }

  Eigen::RowVectorXd h_prev = Eigen::RowVectorXd::Zero(H);
  Eigen::RowVectorXd c_prev = Eigen::RowVectorXd::Zero(H);
  for (Eigen::Index t = 0; t < T; t++) {
    Eigen::RowVectorXd pre = xp.row(t) + h_prev * p.W_h.transpose();
    for (Eigen::Index u = 0; u < H; u++) {
      const double i = Sigmoid(pre[u]);
      const double f = Sigmoid(pre[H + u]);
      const double g = std::tanh(pre[2 * H + u]);
      const double o = Sigmoid(pre[3 * H + u]);
      gates(t, u) = i;
      gates(t, H + u) = f;
      gates(t, 2 * H + u) = g;
      gates(t, 3 * H + u) = o;
      c_tilde(t, u) = f * c_prev[u] + i * g;
      c(t, u) = mask_c(t, u) * c_prev[u] + (1.0 - mask_c(t, u)) * c_tilde(t, u);
      h_tilde(t, u) = o * std::tanh(c(t, u));
      h(t, u) = mask_h(t, u) * h_prev[u] + (1.0 - mask_h(t, u)) * h_tilde(t, u);
    }
    h_prev = h.row(t);
    c_prev = c.row(t);
  }

  if (cache) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->c_tilde = std::move(c_tilde);
    cache->h_tilde = std::move(h_tilde);
    cache->c = c;
    cache->h = h;
    cache->mask_c = std::move(mask_c);
    cache->mask_h = std::move(mask_h);
  }
  return h;
}

Mat LstmBackward(const LstmCell &p, const LstmSeqCache &cache, const Mat &dh,
                 LstmCell *grad) {
  const Eigen::Index T = cache.x.rows(), H = p.hidden();
  if (dh.rows() != T || dh.cols() != H)
    throw ShapeMismatch("LstmBackward: bad dh shape");

  Mat da(T, 4 * H);  // pre-activation gate grads, filled back-to-front
  Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(H);
  Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(H);

  for (Eigen::Index t = T - 1; t >= 0; t--) {
    const Eigen::RowVectorXd h_prev =
        t > 0 ? cache.h.row(t - 1) : Eigen::RowVectorXd::Zero(H).eval();
    const Eigen::RowVectorXd c_prev =
        t > 0 ? cache.c.row(t - 1) : Eigen::RowVectorXd::Zero(H).eval();
    Eigen::RowVectorXd dh_t = dh.row(t) + dh_next;
    Eigen::RowVectorXd dc_t = dc_next;
    dh_next.setZero();
    dc_next.setZero();
    for (Eigen::Index u = 0; u < H; u++) {
      const double i = cache.gates(t, u);
      const double f = cache.gates(t, H + u);
      const double g = cache.gates(t, 2 * H + u);
      const double o = cache.gates(t, 3 * H + u);
      const double mc = cache.mask_c(t, u);
      const double mh = cache.mask_h(t, u);
      const double tanh_c = std::tanh(cache.c(t, u));

      const double dh_tilde = dh_t[u] * (1.0 - mh);
      dh_next[u] += dh_t[u] * mh;
      const double do_ = dh_tilde * tanh_c;
      double dc = dc_t[u] + dh_tilde * o * (1.0 - tanh_c * tanh_c);
      const double dc_tilde = dc * (1.0 - mc);
      dc_next[u] += dc * mc + dc_tilde * f;
      const double di = dc_tilde * g;
      const double df = dc_tilde * c_prev[u];
      const double dg = dc_tilde * i;

      da(t, u) = di * i * (1.0 - i);
      da(t, H + u) = df * f * (1.0 - f);
      da(t, 2 * H + u) = dg * (1.0 - g * g);
      da(t, 3 * H + u) = do_ * o * (1.0 - o);
    }
    grad->W_h.noalias() += da.row(t).transpose() * h_prev;
    dh_next.noalias() += da.row(t) * p.W_h;
  }

  grad->W_x.noalias() += da.transpose() * cache.x;
  grad->b.row(0) += da.colwise().sum();
  return da * p.W_x;
}

// ------------------------------- BLSTM --------------------------------

Blstm Blstm::Create(Eigen::Index in, Eigen::Index hidden, double zoneout_c,
                    double zoneout_h, RngStream &rng) {
  Blstm b;
  b.fwd = LstmCell::Create(in, hidden, zoneout_c, zoneout_h, rng);
  b.bwd = LstmCell::Create(in, hidden, zoneout_c, zoneout_h, rng);
  return b;
}

Blstm Blstm::ZeroLike() const {
  Blstm b;
  b.fwd = fwd.ZeroLike();
  b.bwd = bwd.ZeroLike();
  return b;
}

Mat BlstmForward(const Blstm &p, const Mat &x, bool training, RngStream *rng,
                 BlstmCache *cache) {
  PPGFACE_CHECK(x.rows() >= 1, "BlstmForward: empty sequence");
  const Eigen::Index T = x.rows(), H = p.fwd.hidden();
  const Mat h_fwd = LstmForward(p.fwd, x, training, rng,
                                cache ? &cache->fwd : nullptr);
  const Mat x_rev = x.colwise().reverse();
  const Mat h_bwd_rev = LstmForward(p.bwd, x_rev, training, rng,
                                    cache ? &cache->bwd : nullptr);
  Mat y(T, 2 * H);
  y.leftCols(H) = h_fwd;
  y.rightCols(H) = h_bwd_rev.colwise().reverse();
  return y;
}

Mat BlstmBackward(const Blstm &p, const BlstmCache &cache, const Mat &dy,
                  Blstm *grad) {
  const Eigen::Index H = p.fwd.hidden();
  if (dy.cols() != 2 * H) throw ShapeMismatch("BlstmBackward: bad dy");
  const Mat dx_fwd = LstmBackward(p.fwd, cache.fwd, dy.leftCols(H), &grad->fwd);
  const Mat dh_bwd_rev = dy.rightCols(H).colwise().reverse();
  const Mat dx_bwd_rev = LstmBackward(p.bwd, cache.bwd, dh_bwd_rev, &grad->bwd);
  return dx_fwd + dx_bwd_rev.colwise().reverse();
}

// ------------------------------- Losses -------------------------------

Mat Softmax(const Mat &logits) {
  Mat out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); t++) {
    const double mx = logits.row(t).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(t).array() - mx).exp();
    out.row(t) = e / e.sum();
  }
  return out;
}

double SoftmaxXent(const Mat &logits, const std::vector<int> &labels,
                   Mat *dlogits) {
  const Eigen::Index T = logits.rows(), P = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != T)
    throw ShapeMismatch("SoftmaxXent: labels/logits length mismatch");
  Mat probs = Softmax(logits);
  double loss = 0.0;
  for (Eigen::Index t = 0; t < T; t++) {
    PPGFACE_CHECK(labels[t] >= 0 && labels[t] < P,
                  "SoftmaxXent: label out of range");
    loss -= std::log(std::max(probs(t, labels[t]), 1e-300));
  }
  loss /= T;
  if (dlogits) {
    *dlogits = probs;
    for (Eigen::Index t = 0; t < T; t++) (*dlogits)(t, labels[t]) -= 1.0;
    *dlogits /= static_cast<double>(T);
  }
  return loss;
}

double MseLoss(const Mat &pred, const Mat &target, Mat *dpred) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ShapeMismatch("MseLoss: shape mismatch");
  const Mat diff = pred - target;
  const double n = static_cast<double>(pred.size());
  if (dpred) *dpred = 2.0 * diff / n;
  return diff.squaredNorm() / n;
}

// -------------------------------- Adam --------------------------------

void AdamStep(const std::vector<Mat *> &params,
              const std::vector<const Mat *> &grads, AdamState *state,
              double lr, double beta1, double beta2, double eps) {
  PPGFACE_ASSERT(params.size() == grads.size(), "AdamStep: list mismatch");
  if (state->m.empty()) {
    for (const Mat *p : params) {
      state->m.push_back(Mat::Zero(p->rows(), p->cols()));
      state->v.push_back(Mat::Zero(p->rows(), p->cols()));
    }
  }
  PPGFACE_ASSERT(state->m.size() == params.size(), "AdamStep: stale state");
  state->step++;
  const double bc1 = 1.0 - std::pow(beta1, state->step);
  const double bc2 = 1.0 - std::pow(beta2, state->step);
  for (size_t i = 0; i < params.size(); i++) {
    Mat &m = state->m[i];
    Mat &v = state->v[i];
    const Mat &g = *grads[i];
    m = beta1 * m + (1.0 - beta1) * g;
    v = (beta2 * v.array() + (1.0 - beta2) * g.array().square()).matrix();
    params[i]->array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  }
}

double ClipGlobalNorm(const std::vector<Mat *> &grads, double max_norm) {
  double sq = 0.0;
  for (const Mat *g : grads) sq += g->squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const double scale = max_norm / norm;
    for (Mat *g : grads) *g *= scale;
  }
  return norm;
}

// ----------------------------- Grad check -----------------------------

double GradCheck(const std::function<double()> &loss_fn,
                 const std::vector<Mat *> &params,
                 const std::vector<Mat> &analytic, double eps) {
  PPGFACE_ASSERT(params.size() == analytic.size(), "GradCheck: list mismatch");
  double max_rel = 0.0;
  for (size_t i = 0; i < params.size(); i++) {
    Mat &p = *params[i];
    for (Eigen::Index j = 0; j < p.size(); j++) {
      const double saved = p.data()[j];
      p.data()[j] = saved + eps;
      const double up = loss_fn();
      p.data()[j] = saved - eps;
      const double down = loss_fn();
      p.data()[j] = saved;
      const double fd = (up - down) / (2.0 * eps);
      const double an = analytic[i].data()[j];
      const double denom = std::max(1e-8, std::abs(fd) + std::abs(an));
      max_rel = std::max(max_rel, std::abs(fd - an) / denom);
    }
  }
  return max_rel;
}

}  // namespace nnet
}  // namespace ppgface
