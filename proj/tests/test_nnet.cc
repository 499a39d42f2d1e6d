// tests/test_nnet.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ppgface/nnet.h"
#include "ppgface/rng.h"

using namespace ppgface;
using namespace ppgface::nnet;

namespace {

Mat RandomMat(Eigen::Index r, Eigen::Index c, RngStream &rng, double scale = 1.0) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); i++) m.data()[i] = scale * rng.Gaussian();
  return m;
}

}  // namespace

TEST_CASE("dense: zero weights give the bias, hand case gives 11") {
  RngStream rng(1);
  Dense d = Dense::Create(3, 2, Activation::kLinear, rng);
  d.W.setZero();
  d.b << 0.5, -1.5;
  const Mat y = DenseForward(d, Mat::Zero(4, 3));
  for (int t = 0; t < 4; t++) {
    CHECK(y(t, 0) == 0.5);
    CHECK(y(t, 1) == -1.5);
  }

  Dense h = Dense::Create(2, 1, Activation::kLinear, rng);
  h.W << 1.0, 2.0;
  h.b << 0.0;
  Mat x(1, 2);
  x << 3.0, 4.0;
  CHECK(DenseForward(h, x)(0, 0) == doctest::Approx(11.0));
}

TEST_CASE("dense gradients match finite differences") {
  RngStream rng(2);
  for (int rep = 0; rep < 8; rep++) {
    const auto act = static_cast<Activation>(rep % 3);
    Dense d = Dense::Create(4, 3, act, rng);
    Mat x = RandomMat(5, 4, rng);
    const Mat target = RandomMat(5, 3, rng);

    Dense grad = d.ZeroLike();
    Mat dx_analytic;
    auto run = [&](bool backward) {
      DenseCache cache;
      const Mat y = DenseForward(d, x, &cache);
      Mat dy;
      const double loss = MseLoss(y, target, &dy);
      if (backward) dx_analytic = DenseBackward(d, cache, dy, &grad);
      return loss;
    };
    run(true);
    const double err = GradCheck([&] { return run(false); }, {&d.W, &d.b, &x},
                                 {grad.W, grad.b, dx_analytic});
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("conv1d: k=1 identity kernel is the identity") {
  RngStream rng(3);
  Conv1d c = Conv1d::Create(2, 2, 1, rng);
  c.K << 1, 0, 0, 1;
  c.b.setZero();
  const Mat x = RandomMat(6, 2, rng);
  CHECK((Conv1dForward(c, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conv1d: [1,0,-1] on a unit ramp gives -2 in the interior") {
  RngStream rng(4);
  Conv1d c = Conv1d::Create(1, 1, 3, rng);
  c.K << 1.0, 0.0, -1.0;
  c.b.setZero();
  Mat x(10, 1);
  for (int t = 0; t < 10; t++) x(t, 0) = t;
  const Mat y = Conv1dForward(c, x);
  for (int t = 1; t < 9; t++) CHECK(y(t, 0) == doctest::Approx(-2.0));
}

TEST_CASE("conv1d rejects even kernels") {
  RngStream rng(5);
  CHECK_THROWS_AS(Conv1d::Create(2, 3, 4, rng), DataError);
}

TEST_CASE("conv1d gradients match finite differences") {
  RngStream rng(6);
  for (int rep = 0; rep < 4; rep++) {
    Conv1d c = Conv1d::Create(3, 2, 5, rng);
    Mat x = RandomMat(7, 3, rng);
    const Mat target = RandomMat(7, 2, rng);

    Conv1d grad = c.ZeroLike();
    Mat dx_analytic;
    auto run = [&](bool backward) {
      Conv1dCache cache;
      const Mat y = Conv1dForward(c, x, &cache);
      Mat dy;
      const double loss = MseLoss(y, target, &dy);
      if (backward) dx_analytic = Conv1dBackward(c, cache, dy, &grad);
      return loss;
    };
    run(true);
    const double err = GradCheck([&] { return run(false); }, {&c.K, &c.b, &x},
                                 {grad.K, grad.b, dx_analytic});
    CHECK(err <= 1e-6);
  }
}

TEST_CASE("lstm: zoneout 0 equals the plain step, zoneout 1 freezes state") {
  RngStream rng(7);
  LstmCell cell = LstmCell::Create(3, 4, 0.0, 0.0, rng);
  const Mat x = RandomMat(6, 3, rng);

  RngStream train_rng(11);
  const Mat h_train = LstmForward(cell, x, true, &train_rng);
  const Mat h_infer = LstmForward(cell, x, false, nullptr);
  CHECK((h_train - h_infer).cwiseAbs().maxCoeff() == 0.0);

  cell.zoneout_c = 1.0;
  cell.zoneout_h = 1.0;
  const Mat frozen = LstmForward(cell, x, false, nullptr);
  CHECK(frozen.cwiseAbs().maxCoeff() == 0.0);  // initial state carried forever

  Eigen::RowVectorXd h_prev = RandomMat(1, 4, rng).row(0);
  Eigen::RowVectorXd c_prev = RandomMat(1, 4, rng).row(0);
  Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(4);
  Eigen::RowVectorXd h_t, c_t;
  LstmStep(cell, x.row(0), h_prev, c_prev, ones, ones, &h_t, &c_t);
  CHECK((h_t - h_prev).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c_t - c_prev).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lstm BPTT gradients with frozen zoneout masks, T=7 H=5") {
  RngStream rng(8);
  LstmCell cell = LstmCell::Create(4, 5, 0.3, 0.2, rng);
  Mat x = RandomMat(7, 4, rng);
  const Mat target = RandomMat(7, 5, rng);

  LstmCell grad = cell.ZeroLike();
  Mat dx_analytic;
  auto run = [&](bool backward) {
    RngStream mask_rng(555);  // same masks every evaluation
    LstmSeqCache cache;
    const Mat h = LstmForward(cell, x, true, &mask_rng, &cache);
    Mat dh;
    const double loss = MseLoss(h, target, &dh);
    if (backward) dx_analytic = LstmBackward(cell, cache, dh, &grad);
    return loss;
  };
  run(true);
  const double err =
      GradCheck([&] { return run(false); }, {&cell.W_x, &cell.W_h, &cell.b, &x},
                {grad.W_x, grad.W_h, grad.b, dx_analytic});
  CHECK(err <= 1e-4);
}

TEST_CASE("blstm: T=1 shape and reversal symmetry with tied directions") {
  RngStream rng(9);
  Blstm layer = Blstm::Create(3, 4, 0.0, 0.0, rng);
  const Mat single = RandomMat(1, 3, rng);
  CHECK(BlstmForward(layer, single, false, nullptr).rows() == 1);
  CHECK(BlstmForward(layer, single, false, nullptr).cols() == 8);

  layer.bwd = layer.fwd;  // tie directions
  const Mat x = RandomMat(9, 3, rng);
  const Mat y = BlstmForward(layer, x, false, nullptr);
  const Mat y_rev = BlstmForward(layer, x.colwise().reverse(), false, nullptr);
  // reversing input swaps the halves of the time-reversed output
  const Mat swapped_rev =
      (Mat(9, 8) << y_rev.rightCols(4), y_rev.leftCols(4)).finished()
          .colwise()
          .reverse();
  CHECK((y - swapped_rev).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two stacked blstm layers pass the finite-difference check") {
  RngStream rng(10);
  Blstm l1 = Blstm::Create(3, 4, 0.15, 0.1, rng);
  Blstm l2 = Blstm::Create(8, 3, 0.15, 0.1, rng);
  Mat x = RandomMat(5, 3, rng);
  const Mat target = RandomMat(5, 6, rng);

  Blstm g1 = l1.ZeroLike(), g2 = l2.ZeroLike();
  Mat dx_analytic;
  auto run = [&](bool backward) {
    RngStream mask_rng(777);
    BlstmCache c1, c2;
    const Mat h1 = BlstmForward(l1, x, true, &mask_rng, &c1);
    const Mat h2 = BlstmForward(l2, h1, true, &mask_rng, &c2);
    Mat dh2;
    const double loss = MseLoss(h2, target, &dh2);
    if (backward) {
      const Mat dh1 = BlstmBackward(l2, c2, dh2, &g2);
      dx_analytic = BlstmBackward(l1, c1, dh1, &g1);
    }
    return loss;
  };
  run(true);
  std::vector<Mat *> params = {&l1.fwd.W_x, &l1.fwd.W_h, &l1.fwd.b,
                               &l1.bwd.W_x, &l1.bwd.W_h, &l1.bwd.b,
                               &l2.fwd.W_x, &l2.fwd.W_h, &l2.fwd.b,
                               &l2.bwd.W_x, &l2.bwd.W_h, &l2.bwd.b,
                               &x};
  std::vector<Mat> analytic = {g1.fwd.W_x, g1.fwd.W_h, g1.fwd.b,
                               g1.bwd.W_x, g1.bwd.W_h, g1.bwd.b,
                               g2.fwd.W_x, g2.fwd.W_h, g2.fwd.b,
                               g2.bwd.W_x, g2.bwd.W_h, g2.bwd.b,
                               dx_analytic};
  CHECK(GradCheck([&] { return run(false); }, params, analytic) <= 1e-4);
}

TEST_CASE("softmax cross-entropy: uniform logits cost ln 4, gradient checks") {
  Mat logits = Mat::Zero(3, 4);
  std::vector<int> labels = {0, 2, 3};
  CHECK(SoftmaxXent(logits, labels, nullptr) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  RngStream rng(11);
  logits = RandomMat(5, 6, rng);
  Mat dlogits;
  SoftmaxXent(logits, {1, 0, 5, 2, 2}, &dlogits);
  const double err = GradCheck(
      [&] { return SoftmaxXent(logits, {1, 0, 5, 2, 2}, nullptr); }, {&logits},
      {dlogits});
  CHECK(err <= 1e-6);
}

TEST_CASE("mse loss: zero at equality, gradient checks") {
  RngStream rng(12);
  const Mat a = RandomMat(4, 3, rng);
  Mat da;
  CHECK(MseLoss(a, a, &da) == 0.0);
  CHECK(da.cwiseAbs().maxCoeff() == 0.0);

  Mat pred = RandomMat(4, 3, rng);
  const Mat target = RandomMat(4, 3, rng);
  Mat dpred;
  MseLoss(pred, target, &dpred);
  CHECK(GradCheck([&] { return MseLoss(pred, target, nullptr); }, {&pred},
                  {dpred}) <= 1e-6);
}

TEST_CASE("adam: zero gradient no-op, first step moves by -lr sign(g)") {
  RngStream rng(13);
  Mat p = RandomMat(3, 3, rng);
  const Mat p0 = p;
  const Mat zero = Mat::Zero(3, 3);
  AdamState st;
  AdamStep({&p}, {&zero}, &st, 1e-3);
  CHECK((p - p0).cwiseAbs().maxCoeff() == 0.0);

  Mat q = RandomMat(3, 3, rng);
  const Mat q0 = q;
  const Mat g = RandomMat(3, 3, rng);
  AdamState st2;
  const double lr = 1e-3;
  AdamStep({&q}, {&g}, &st2, lr);
  for (Eigen::Index i = 0; i < q.size(); i++) {
    const double step = q.data()[i] - q0.data()[i];
    const double expect = -lr * (g.data()[i] > 0 ? 1.0 : -1.0);
    CHECK(std::abs(step - expect) < 1e-6);
  }

  // determinism
  Mat r1 = q0, r2 = q0;
  AdamState s1, s2;
  AdamStep({&r1}, {&g}, &s1, lr);
  AdamStep({&r2}, {&g}, &s2, lr);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("clip by global norm") {
  Mat a = Mat::Constant(2, 2, 3.0);  // norm 6
  Mat b = Mat::Constant(2, 2, 4.0);  // norm 8; global 10
  const double pre = ClipGlobalNorm({&a, &b}, 5.0);
  CHECK(pre == doctest::Approx(10.0));
  double sq = a.squaredNorm() + b.squaredNorm();
  CHECK(std::sqrt(sq) == doctest::Approx(5.0));
}

TEST_CASE("full-batch adam monotonically decreases tiny-model losses") {
  RngStream rng(14);

  SUBCASE("conv + dense classifier") {
    Conv1d conv = Conv1d::Create(6, 8, 5, rng);
    Dense top = Dense::Create(8, 4, Activation::kLinear, rng);
    const Mat x = RandomMat(20, 6, rng);
    std::vector<int> labels(20);
    for (auto &l : labels) l = static_cast<int>(rng.UniformInt(4));

    AdamState st;
    double prev = 1e300;
    for (int step = 0; step < 50; step++) {
      Conv1dCache cc;
      DenseCache dc;
      const Mat conv_out = Conv1dForward(conv, x, &cc);
      const Mat hidden = conv_out.cwiseMax(0.0);
      const Mat logits = DenseForward(top, hidden, &dc);
      Mat dlogits;
      const double loss = SoftmaxXent(logits, labels, &dlogits);
      CHECK(loss <= prev + 1e-12);
      prev = loss;

      Conv1d gc = conv.ZeroLike();
      Dense gt = top.ZeroLike();
      Mat dhidden = DenseBackward(top, dc, dlogits, &gt);
      dhidden =
          (dhidden.array() * (conv_out.array() > 0).cast<double>()).matrix();
      Conv1dBackward(conv, cc, dhidden, &gc);
      AdamStep({&conv.K, &conv.b, &top.W, &top.b},
               {&gc.K, &gc.b, &gt.W, &gt.b}, &st, 1e-3);
    }
  }

  SUBCASE("blstm + dense regressor") {
    Blstm layer = Blstm::Create(5, 4, 0.0, 0.0, rng);
    Dense top = Dense::Create(8, 2, Activation::kLinear, rng);
    const Mat x = RandomMat(12, 5, rng);
    const Mat target = RandomMat(12, 2, rng);

    AdamState st;
    double prev = 1e300;
    for (int step = 0; step < 50; step++) {
      BlstmCache bc;
      DenseCache dc;
      const Mat h = BlstmForward(layer, x, false, nullptr, &bc);
      const Mat y = DenseForward(top, h, &dc);
      Mat dy;
      const double loss = MseLoss(y, target, &dy);
      CHECK(loss <= prev + 1e-12);
      prev = loss;

      Blstm gl = layer.ZeroLike();
      Dense gt = top.ZeroLike();
      const Mat dh = DenseBackward(top, dc, dy, &gt);
      BlstmBackward(layer, bc, dh, &gl);
      std::vector<Mat *> params, grads_v;
      layer.Collect(params);
      top.Collect(params);
      std::vector<Mat *> gptrs;
      gl.Collect(gptrs);
      gt.Collect(gptrs);
      std::vector<const Mat *> grads(gptrs.begin(), gptrs.end());
      AdamStep(params, grads, &st, 1e-3);
    }
  }
}
