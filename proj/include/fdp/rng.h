// Copyright 2026 The fdp-engine Authors
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

// Philox4x32-10 counter-based generator and a deterministic parallel trial
// runner. Streams are addressed by (seed, stream) so that trial t always sees
// the same numbers no matter which worker runs it.

#ifndef FDP_RNG_H_
#define FDP_RNG_H_

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace fdp {

using PhiloxBlock = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;

// One application of the ten-round Philox4x32 bijection.
PhiloxBlock Philox4x32(PhiloxBlock counter, PhiloxKey key);

class Philox {
 public:
  using result_type = uint64_t;

  Philox(uint64_t seed, uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return NextU64(); }

  uint32_t NextU32();
  uint64_t NextU64();
  // Uniform on [0,1) with 53 random bits.
  double NextDouble();
  // Uniform on (0,1).
  double NextOpenDouble();
  // Uniform on {0, ..., n-1}; n > 0. Unbiased (Lemire's rejection).
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller; the second variate is cached.
  double NextNormal();

 private:
  void Refill();

  PhiloxKey key_;
  PhiloxBlock counter_;
  PhiloxBlock buffer_;
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// In-place Fisher-Yates shuffle.
template <typename T>
void Shuffle(std::vector<T>& v, Philox& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.UniformInt(i));
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct values from {0, ..., n-1} (Floyd), in draw order.
std::vector<uint64_t> SampleDistinct(uint64_t n, uint64_t k, Philox& rng);

// Calls body(chunk, begin, end) over [0, n) split into contiguous chunks, one
// thread per chunk. chunk < workers. The body must only write state owned by
// its chunk.
void ParallelChunks(int64_t n, int workers,
                    const std::function<void(int, int64_t, int64_t)>& body);

int DefaultWorkerCount();

}  // namespace fdp

#endif  // FDP_RNG_H_
