// Copyright 2026 The hypoineq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace hypo {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_id(std::string_view id);

/// Counter-based random stream.
///
/// A stream is identified by a 64-bit key and a 64-bit substream index (the
/// path index in Monte Carlo runs); draws walk a private block counter. Two
/// streams built from the same (key, substream) produce identical sequences
/// regardless of when or on which thread they are used, which is what makes
/// reports reproducible under any parallel schedule. Copying a stream copies
/// its position, so a copy replays the same draws (common random numbers).
class RandomStream {
 public:
  RandomStream(std::uint64_t key, std::uint64_t substream);

  /// Key derived from an experiment seed and an object id.
  static std::uint64_t derive_key(std::uint64_t seed, std::string_view id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Independent child stream; child i of a given stream is always the same.
  RandomStream split(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t substream() const { return substream_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hypo
