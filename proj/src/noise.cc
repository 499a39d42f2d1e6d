// src/noise.cc

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

#include "ppgface/noise.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

namespace ppgface {

namespace {

void NormalizeRms(std::vector<double> &s) {
  double p = 0.0;
  for (double v : s) p += v * v;
  p = std::sqrt(p / s.size());
  PPGFACE_ASSERT(p > 0, "NormalizeRms: zero-power noise");
  for (double &v : s) v /= p;
}

std::vector<double> White(size_t n, RngStream &rng) {
  std::vector<double> s(n);
  for (double &v : s) v = rng.Gaussian();
  return s;
}

// Exact 1/f spectral shaping: Gaussian half-spectrum scaled by
// 1/sqrt(f), inverse real FFT. DC is zeroed.
std::vector<double> Pink(size_t n, RngStream &rng) {
  const size_t n_bins = n / 2 + 1;
  fftw_complex *spec;
  double *time;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(FftwPlanMutex());
    spec = fftw_alloc_complex(n_bins);
    time = fftw_alloc_real(n);
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, time, FFTW_ESTIMATE);
  }
  spec[0][0] = spec[0][1] = 0.0;
  for (size_t k = 1; k < n_bins; k++) {
    const double a = 1.0 / std::sqrt(static_cast<double>(k));
    spec[k][0] = a * rng.Gaussian();
    spec[k][1] = a * rng.Gaussian();
  }
  if (n % 2 == 0) spec[n_bins - 1][1] = 0.0;  // Nyquist bin must be real
  fftw_execute(plan);
  std::vector<double> s(time, time + n);
  {
    std::lock_guard<std::mutex> lock(FftwPlanMutex());
    fftw_destroy_plan(plan);
    fftw_free(spec);
    fftw_free(time);
  }
  return s;
}

// 50 Hz mains harmonics over a low white floor.
std::vector<double> HumOffice(size_t n, RngStream &rng) {
  std::vector<double> s = White(n, rng);
  for (double &v : s) v *= 0.25;
  const double phase0 = rng.Uniform(0, 2 * M_PI);
  for (int k = 1; k <= 8; k++) {
    const double w = 2.0 * M_PI * 50.0 * k / kSampleRate;
    const double a = 1.0 / k;
    for (size_t i = 0; i < n; i++) s[i] += a * std::sin(w * i + phase0 * k);
  }
  return s;
}

// Six independent formant-chord streams with segmental structure,
// summed -- a crude babble stand-in.
std::vector<double> Babble(size_t n, RngStream &rng) {
  std::vector<double> s(n, 0.0);
  const int xfade = kSampleRate / 100;  // 10 ms
  for (int talker = 0; talker < 6; talker++) {
    RngStream tr = rng.Fork("talker" + std::to_string(talker));
    size_t pos = tr.UniformInt(kSampleRate / 4);  // staggered starts
    while (pos < n) {
      const size_t seg = kSampleRate / 8 + tr.UniformInt(kSampleRate / 8);
      const double amp = tr.Uniform(0.4, 1.0);
      double f[3], ph[3];
      for (int j = 0; j < 3; j++) {
        f[j] = tr.Uniform(200.0, 3000.0);
        ph[j] = tr.Uniform(0, 2 * M_PI);
      }
      const size_t end = std::min(n, pos + seg);
      for (size_t i = pos; i < end; i++) {
        double env = 1.0;
        if (i - pos < static_cast<size_t>(xfade))
          env = 0.5 - 0.5 * std::cos(M_PI * (i - pos) / xfade);
        else if (end - i < static_cast<size_t>(xfade))
          env = 0.5 - 0.5 * std::cos(M_PI * (end - i) / xfade);
        double v = 0.0;
        for (int j = 0; j < 3; j++)
          v += std::sin(2.0 * M_PI * f[j] * i / kSampleRate + ph[j]);
        s[i] += amp * env * v / 3.0;
      }
      pos = end;
    }
  }
  return s;
}

// Mean per-frame power (unwindowed sum of squares) over the active mask.
double MaskedFramePower(const std::vector<double> &samples,
                        const std::vector<char> &active,
                        const FrameConfig &cfg) {
  const int len = cfg.FrameLengthSamples();
  const int shift = cfg.FrameShiftSamples();
  double acc = 0.0;
  int count = 0;
  for (size_t t = 0; t < active.size(); t++) {
    if (!active[t]) continue;
    const size_t off = t * shift;
    double e = 0.0;
    for (int i = 0; i < len; i++) e += samples[off + i] * samples[off + i];
    acc += e;
    count++;
  }
  PPGFACE_ASSERT(count > 0, "MaskedFramePower: empty mask");
  return acc / count;
}

std::vector<char> ActiveMask(const Waveform &clean, const FrameConfig &cfg) {
  const FeatureMatrix e = FrameEnergy(clean, cfg);
  const double thresh = std::log(cfg.mel_floor) + 2.0;
  std::vector<char> active(e.NumFrames());
  for (Eigen::Index t = 0; t < e.NumFrames(); t++)
    active[t] = e.data(t, 0) > thresh;
  return active;
}

}  // namespace

std::string NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kHumOffice: return "hum_office";
    case NoiseKind::kBabble: return "babble";
  }
  throw InternalError("NoiseKindName: bad kind");
}

NoiseKind NoiseKindFromName(const std::string &name) {
  for (NoiseKind k : kAllNoiseKinds)
    if (NoiseKindName(k) == name) return k;
  throw DataError("unknown noise kind: " + name);
}

Waveform SynthNoise(NoiseKind kind, size_t length, uint64_t seed) {
  PPGFACE_CHECK(length > 0, "SynthNoise: length must be positive");
  RngStream rng(seed ^ (static_cast<uint64_t>(kind) << 56));
  std::vector<double> s;
  switch (kind) {
    case NoiseKind::kWhite: s = White(length, rng); break;
    case NoiseKind::kPink: s = Pink(length, rng); break;
    case NoiseKind::kHumOffice: s = HumOffice(length, rng); break;
    case NoiseKind::kBabble: s = Babble(length, rng); break;
  }
  NormalizeRms(s);
  Waveform w;
  w.samples = std::move(s);
  return w;
}

Waveform MixNoise(const Waveform &clean, const Waveform &noise, double snr_db,
                  RngStream &rng, const FrameConfig &cfg) {
  PPGFACE_CHECK(std::isfinite(snr_db), "MixNoise: snr_db must be finite");
  if (noise.NumSamples() < clean.NumSamples())
    throw DataError("NoiseTooShort: noise shorter than clean signal");

  const std::vector<char> active = ActiveMask(clean, cfg);
  if (std::find(active.begin(), active.end(), char(1)) == active.end())
    throw DataError("SilentClean: no active-speech frames to measure SNR");

  const size_t slack = noise.NumSamples() - clean.NumSamples();
  const size_t offset = slack > 0 ? rng.UniformInt(slack + 1) : 0;
  std::vector<double> crop(noise.samples.begin() + offset,
                           noise.samples.begin() + offset + clean.NumSamples());

  const double p_clean = MaskedFramePower(clean.samples, active, cfg);
  const double p_noise = MaskedFramePower(crop, active, cfg);
  PPGFACE_CHECK(p_noise > 0, "MixNoise: zero-power noise crop");
  const double g = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));

  Waveform out;
  out.sample_rate_hz = clean.sample_rate_hz;
  out.samples.resize(clean.NumSamples());
  for (size_t i = 0; i < out.samples.size(); i++)
    out.samples[i] = std::clamp(clean.samples[i] + g * crop[i], -1.0, 1.0);
  return out;
}

double MeasureSnrDb(const Waveform &clean, const Waveform &noisy,
                    const FrameConfig &cfg) {
  PPGFACE_CHECK(clean.NumSamples() == noisy.NumSamples(),
                "MeasureSnrDb: length mismatch");
  const std::vector<char> active = ActiveMask(clean, cfg);
  std::vector<double> residual(clean.NumSamples());
  for (size_t i = 0; i < residual.size(); i++)
    residual[i] = noisy.samples[i] - clean.samples[i];
  const double pc = MaskedFramePower(clean.samples, active, cfg);
  const double pn = MaskedFramePower(residual, active, cfg);
  return 10.0 * std::log10(pc / pn);
}

}  // namespace ppgface
