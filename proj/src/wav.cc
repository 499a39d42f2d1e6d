// src/wav.cc

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

#include "ppgface/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ppgface {

namespace {

uint32_t ReadU32(std::istream &is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char *>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}

uint16_t ReadU16(std::istream &is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char *>(b), 2);
  return b[0] | (b[1] << 8);
}

void WriteU32(std::ostream &os, uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  os.write(b, 4);
}

void WriteU16(std::ostream &os, uint16_t v) {
  char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace

void Waveform::Validate() const {
  if (sample_rate_hz != kSampleRate)
    throw DataError("Waveform: sample rate must be 16000 Hz, got " +
                    std::to_string(sample_rate_hz));
  for (double s : samples) {
    if (!std::isfinite(s) || std::abs(s) > 1.0)
      throw DataError("Waveform: sample out of [-1,1] or non-finite");
  }
}

Waveform ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("ReadWav: cannot open " + path);

  char riff[4], wave[4];
  is.read(riff, 4);
  ReadU32(is);  // total size
  is.read(wave, 4);
  if (!is || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
    throw DataError("ReadWav: not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  uint16_t channels = 0, bits = 0, format = 0;
  uint32_t rate = 0;
  std::vector<int16_t> pcm;

  while (is) {
    char id[4];
    is.read(id, 4);
    if (!is) break;
    uint32_t size = ReadU32(is);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = ReadU16(is);
      channels = ReadU16(is);
      rate = ReadU32(is);
      ReadU32(is);  // byte rate
      ReadU16(is);  // block align
      bits = ReadU16(is);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw DataError("ReadWav: data before fmt chunk");
      pcm.resize(size / 2);
      is.read(reinterpret_cast<char *>(pcm.data()), pcm.size() * 2);
      break;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);  // chunks are word-aligned
    }
  }

  if (!have_fmt) throw DataError("ReadWav: missing fmt chunk: " + path);
  if (format != 1 || bits != 16)
    throw DataError("ReadWav: only PCM 16-bit supported: " + path);
  if (channels != 1) throw DataError("ReadWav: only mono supported: " + path);
  if (rate != kSampleRate)
    throw DataError("ReadWav: only 16 kHz supported, got " + std::to_string(rate));

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.samples.resize(pcm.size());
  for (size_t i = 0; i < pcm.size(); i++)
    w.samples[i] = std::max(pcm[i] / 32767.0, -1.0);
  w.Validate();
  return w;
}

void WriteWav(const std::string &path, const Waveform &wave) {
  if (wave.sample_rate_hz != kSampleRate)
    throw DataError("WriteWav: sample rate must be 16000 Hz");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("WriteWav: cannot open " + path);

  const uint32_t data_size = static_cast<uint32_t>(wave.samples.size() * 2);
  os.write("RIFF", 4);
  WriteU32(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteU32(os, 16);
  WriteU16(os, 1);   // PCM
  WriteU16(os, 1);   // mono
  WriteU32(os, kSampleRate);
  WriteU32(os, kSampleRate * 2);
  WriteU16(os, 2);
  WriteU16(os, 16);
  os.write("data", 4);
  WriteU32(os, data_size);
  for (double s : wave.samples) {
    double c = std::clamp(s, -1.0, 1.0);
    auto v = static_cast<int16_t>(std::lrint(c * 32767.0));
    WriteU16(os, static_cast<uint16_t>(v));
  }
  if (!os) throw IoError("WriteWav: write failed: " + path);
}

}  // namespace ppgface
