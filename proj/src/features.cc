// src/features.cc

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

#include "ppgface/features.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace ppgface {

std::mutex &FftwPlanMutex() {
  static std::mutex m;
  return m;
}

namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> HammingWindow(int len) {
  std::vector<double> w(len);
  for (int n = 0; n < len; n++)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (len - 1));
  return w;
}

// Triangular mel filterbank, n_mels x (n_fft/2 + 1), spanning 0..8000 Hz.
Mat MelFilterbank(const FrameConfig &cfg) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const double mel_lo = HzToMel(0.0);
  const double mel_hi = HzToMel(kSampleRate / 2.0);
  std::vector<double> edges(cfg.n_mels + 2);
  for (int m = 0; m < cfg.n_mels + 2; m++)
    edges[m] = MelToHz(mel_lo + (mel_hi - mel_lo) * m / (cfg.n_mels + 1));

  Mat fb = Mat::Zero(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; m++) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; k++) {
      const double f = static_cast<double>(k) * kSampleRate / cfg.n_fft;
      if (f > lo && f < mid) {
        fb(m, k) = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        fb(m, k) = (hi - f) / (hi - mid);
      }
    }
  }
  return fb;
}

}  // namespace

void FrameConfig::Validate() const {
  PPGFACE_CHECK(frame_shift_ms > 0 && frame_length_ms > 0,
                "FrameConfig: frame timing must be positive");
  PPGFACE_CHECK(frame_shift_ms <= frame_length_ms,
                "FrameConfig: frame_shift_ms must not exceed frame_length_ms");
  PPGFACE_CHECK(n_fft > 0 && (n_fft & (n_fft - 1)) == 0,
                "FrameConfig: n_fft must be a positive power of two");
  PPGFACE_CHECK(n_fft >= FrameLengthSamples(),
                "FrameConfig: n_fft shorter than the frame");
  PPGFACE_CHECK(n_mels > 0 && n_mels <= n_fft / 2 + 1,
                "FrameConfig: n_mels must be in [1, n_fft/2+1]");
  PPGFACE_CHECK(mel_floor > 0, "FrameConfig: mel_floor must be positive");
  PPGFACE_CHECK(preemphasis >= 0 && preemphasis < 1,
                "FrameConfig: preemphasis must be in [0,1)");
}

Eigen::Index NumFramesFor(size_t n_samples, const FrameConfig &cfg) {
  const int len = cfg.FrameLengthSamples();
  const int shift = cfg.FrameShiftSamples();
  if (n_samples < static_cast<size_t>(len))
    throw DataError("EmptyInput: waveform shorter than one frame");
  return static_cast<Eigen::Index>((n_samples - len) / shift) + 1;
}

double MelBinCenterHz(const FrameConfig &cfg, int bin) {
  PPGFACE_CHECK(bin >= 0 && bin < cfg.n_mels, "MelBinCenterHz: bin out of range");
  const double mel_lo = HzToMel(0.0);
  const double mel_hi = HzToMel(kSampleRate / 2.0);
  return MelToHz(mel_lo + (mel_hi - mel_lo) * (bin + 1) / (cfg.n_mels + 1));
}

FeatureMatrix LogMel(const Waveform &wave, const FrameConfig &cfg) {
  cfg.Validate();
  if (wave.sample_rate_hz != kSampleRate)
    throw DataError("BadSampleRate: log_mel requires 16 kHz input");
  const Eigen::Index T = NumFramesFor(wave.NumSamples(), cfg);
  const int len = cfg.FrameLengthSamples();
  const int shift = cfg.FrameShiftSamples();
  const int n_bins = cfg.n_fft / 2 + 1;

  // Pre-emphasis over the whole signal.
  std::vector<double> pre(wave.samples.size());
  if (!pre.empty()) pre[0] = wave.samples[0] * (1.0 - cfg.preemphasis);
  for (size_t n = 1; n < pre.size(); n++)
    pre[n] = wave.samples[n] - cfg.preemphasis * wave.samples[n - 1];

  const std::vector<double> window = HammingWindow(len);
  const Mat fb = MelFilterbank(cfg);

  double *in;
  fftw_complex *out;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(FftwPlanMutex());
    in = fftw_alloc_real(cfg.n_fft);
    out = fftw_alloc_complex(n_bins);
    plan = fftw_plan_dft_r2c_1d(cfg.n_fft, in, out, FFTW_ESTIMATE);
  }

  FeatureMatrix fm;
  fm.kind = FeatureKind::kLogMel;
  fm.frame_shift_ms = cfg.frame_shift_ms;
  fm.data.resize(T, cfg.n_mels);
  Vec power(n_bins);
  for (Eigen::Index t = 0; t < T; t++) {
    const size_t off = static_cast<size_t>(t) * shift;
    for (int n = 0; n < len; n++) in[n] = pre[off + n] * window[n];
    for (int n = len; n < cfg.n_fft; n++) in[n] = 0.0;
    fftw_execute(plan);
    for (int k = 0; k < n_bins; k++)
      power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    Vec mel = fb * power;
    for (int m = 0; m < cfg.n_mels; m++)
      fm.data(t, m) = std::log(std::max(mel[m], cfg.mel_floor));
  }

  {
    std::lock_guard<std::mutex> lock(FftwPlanMutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  return fm;
}

FeatureMatrix FrameEnergy(const Waveform &wave, const FrameConfig &cfg) {
  cfg.Validate();
  if (wave.sample_rate_hz != kSampleRate)
    throw DataError("BadSampleRate: frame_energy requires 16 kHz input");
  const Eigen::Index T = NumFramesFor(wave.NumSamples(), cfg);
  const int len = cfg.FrameLengthSamples();
  const int shift = cfg.FrameShiftSamples();
  const std::vector<double> window = HammingWindow(len);

  FeatureMatrix fm;
  fm.kind = FeatureKind::kEnergy;
  fm.frame_shift_ms = cfg.frame_shift_ms;
  fm.data.resize(T, 1);
  for (Eigen::Index t = 0; t < T; t++) {
    const size_t off = static_cast<size_t>(t) * shift;
    double e = 0.0;
    for (int n = 0; n < len; n++) {
      const double s = wave.samples[off + n] * window[n];
      e += s * s;
    }
    fm.data(t, 0) = std::log(std::max(e, cfg.mel_floor));
  }
  return fm;
}

FeatureMatrix DynamicFeatures(const FeatureMatrix &m) {
  PPGFACE_CHECK(m.NumFrames() >= 1, "DynamicFeatures: empty input");
  const Eigen::Index T = m.NumFrames(), D = m.Dim();
  const int N = 2;  // regression window
  const double denom = 2.0 * (1 * 1 + 2 * 2);

  auto delta = [&](const Mat &c) {
    Mat d(T, D);
    for (Eigen::Index t = 0; t < T; t++) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(D);
      for (int n = 1; n <= N; n++) {
        const Eigen::Index tp = std::min(t + n, T - 1);  // edge replication
        const Eigen::Index tm = std::max<Eigen::Index>(t - n, 0);
        acc += n * (c.row(tp) - c.row(tm));
      }
      d.row(t) = acc / denom;
    }
    return d;
  };

  Mat d1 = delta(m.data);
  Mat d2 = delta(d1);
  FeatureMatrix out;
  out.kind = m.kind;
  out.frame_shift_ms = m.frame_shift_ms;
  out.data.resize(T, 3 * D);
  out.data.leftCols(D) = m.data;
  out.data.middleCols(D, D) = d1;
  out.data.rightCols(D) = d2;
  return out;
}

}  // namespace ppgface
