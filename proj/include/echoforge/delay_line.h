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

#ifndef ECHOFORGE_DELAY_LINE_H_
#define ECHOFORGE_DELAY_LINE_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace echoforge {

// Multi-channel circular buffer. Push() appends one sample per channel;
// Read(channel, d) returns the sample written d samples before the most
// recent one, linearly interpolated for fractional d.
class DelayLine {
 public:
  DelayLine() = default;
  DelayLine(int channels, int capacity)
      : channels_(channels),
        capacity_(std::max(capacity, 2)),
        data_(static_cast<size_t>(channels_) * capacity_, 0.0) {}

  int channels() const { return channels_; }
  int capacity() const { return capacity_; }
  // Largest delay that can be read with interpolation.
  double max_delay() const { return capacity_ - 2; }

  void Push(std::span<const double> frame) {
    head_ = head_ + 1 == capacity_ ? 0 : head_ + 1;
    double* row = &data_[static_cast<size_t>(head_) * channels_];
    std::copy(frame.begin(), frame.begin() + channels_, row);
  }

  double ReadInteger(int channel, int delay) const {
    int idx = head_ - delay;
    if (idx < 0) idx += capacity_;
    return data_[static_cast<size_t>(idx) * channels_ + channel];
  }

  // Delays are clamped to [0, max_delay()].
  double Read(int channel, double delay) const {
    delay = std::clamp(delay, 0.0, max_delay());
    const int d0 = static_cast<int>(delay);
    const double frac = delay - d0;
    const double a = ReadInteger(channel, d0);
    if (frac == 0.0) return a;
    return a + frac * (ReadInteger(channel, d0 + 1) - a);
  }

  void Clear() {
    std::fill(data_.begin(), data_.end(), 0.0);
    head_ = 0;
  }

 private:
  int channels_ = 0;
  int capacity_ = 2;
  std::vector<double> data_;
  int head_ = 0;
};

}  // namespace echoforge

#endif  // ECHOFORGE_DELAY_LINE_H_
