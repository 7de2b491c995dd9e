// Copyright 2026 The EchoForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "echoforge/audio_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "echoforge/rng.h"
#include "echoforge/types.h"

namespace echoforge {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

template <typename T>
T ReadLe(const uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void Put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

double DecodeSample(const uint8_t* p, uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) return ReadLe<float>(p);
    return ReadLe<double>(p);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return ReadLe<int16_t>(p) / 32768.0;
    case 24: {
      int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default:
      return ReadLe<int32_t>(p) / 2147483648.0;
  }
}

}  // namespace

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
  };
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    fail("not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* payload = nullptr;
  size_t payload_size = 0;
  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const uint8_t* chunk = data.data() + pos;
    const uint32_t size = ReadLe<uint32_t>(chunk + 4);
    const size_t body = pos + 8;
    if (body + size > data.size() && std::memcmp(chunk, "data", 4) != 0) {
      fail("truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) fail("short fmt chunk");
      format = ReadLe<uint16_t>(data.data() + body);
      channels = ReadLe<uint16_t>(data.data() + body + 2);
      rate = ReadLe<uint32_t>(data.data() + body + 4);
      bits = ReadLe<uint16_t>(data.data() + body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) fail("short extensible fmt chunk");
        format = ReadLe<uint16_t>(data.data() + body + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = data.data() + body;
      payload_size = std::min<size_t>(size, data.size() - body);
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) fail("missing fmt chunk");
  if (payload == nullptr) fail("missing data chunk");
  const bool ok_pcm =
      format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 ||
                               bits == 32);
  const bool ok_float = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!ok_pcm && !ok_float) fail("unsupported sample format");
  const size_t stride = bits / 8;
  AudioBuffer out;
  out.sample_rate = rate;
  out.channels = channels;
  const size_t count = payload_size / stride / channels * channels;
  out.samples.resize(count);
  for (size_t i = 0; i < count; ++i) {
    out.samples[i] = DecodeSample(payload + i * stride, format, bits);
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio) {
  for (double v : audio.samples) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("refusing to write non-finite audio to " +
                               path.string());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const uint32_t bytes = static_cast<uint32_t>(audio.samples.size() * 4);
  const uint16_t channels = static_cast<uint16_t>(audio.channels);
  const uint32_t rate = static_cast<uint32_t>(std::lround(audio.sample_rate));
  out.write("RIFF", 4);
  Put<uint32_t>(out, 36 + bytes);
  out.write("WAVEfmt ", 8);
  Put<uint32_t>(out, 16);
  Put<uint16_t>(out, kFormatFloat);
  Put<uint16_t>(out, channels);
  Put<uint32_t>(out, rate);
  Put<uint32_t>(out, rate * channels * 4);
  Put<uint16_t>(out, static_cast<uint16_t>(channels * 4));
  Put<uint16_t>(out, 32);
  out.write("data", 4);
  Put<uint32_t>(out, bytes);
  for (double v : audio.samples) Put<float>(out, static_cast<float>(v));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<double> Downmix(const AudioBuffer& audio) {
  const size_t frames = audio.frames();
  std::vector<double> mono(frames, 0.0);
  for (size_t n = 0; n < frames; ++n) {
    double acc = 0.0;
    for (int c = 0; c < audio.channels; ++c) {
      acc += audio.samples[n * audio.channels + c];
    }
    mono[n] = acc / audio.channels;
  }
  return mono;
}

std::vector<double> Resample(std::span<const double> input, double from_rate,
                             double to_rate) {
  if (from_rate <= 0.0 || to_rate <= 0.0) {
    throw std::invalid_argument("sample rates must be positive");
  }
  if (from_rate == to_rate || input.empty()) {
    return {input.begin(), input.end()};
  }
  const size_t frames = static_cast<size_t>(
      std::floor((input.size() - 1) * to_rate / from_rate)) + 1;
  std::vector<double> out(frames);
  for (size_t n = 0; n < frames; ++n) {
    const double x = n * from_rate / to_rate;
    const size_t i = static_cast<size_t>(x);
    const double f = x - i;
    const double a = input[std::min(i, input.size() - 1)];
    const double b = input[std::min(i + 1, input.size() - 1)];
    out[n] = a + f * (b - a);
  }
  return out;
}

std::vector<double> LoadSourceSignal(const std::string& spec,
                                     double sample_rate, size_t frames,
                                     uint64_t seed) {
  std::vector<double> out(frames, 0.0);
  if (spec == "builtin:noise") {
    Rng rng(seed);
    for (double& v : out) v = rng.Uniform(-0.5, 0.5);
    return out;
  }
  if (spec == "builtin:impulse") {
    if (!out.empty()) out[0] = 1.0;
    return out;
  }
  const std::string sine = "builtin:sine:";
  if (spec.rfind(sine, 0) == 0) {
    double hz = 0.0;
    try {
      hz = std::stod(spec.substr(sine.size()));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad sine spec: " + spec);
    }
    for (size_t n = 0; n < frames; ++n) {
      out[n] = 0.5 * std::sin(2.0 * kPi * hz * n / sample_rate);
    }
    return out;
  }
  if (spec.rfind("builtin:", 0) == 0) {
    throw std::invalid_argument("unknown builtin audio: " + spec);
  }
  const AudioBuffer file = ReadWav(spec);
  const std::vector<double> mono =
      Resample(Downmix(file), file.sample_rate, sample_rate);
  if (mono.empty()) return out;
  for (size_t n = 0; n < frames; ++n) out[n] = mono[n % mono.size()];
  return out;
}

}  // namespace echoforge
