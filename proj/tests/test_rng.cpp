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

#include <cmath>
#include <set>

#include "doctest.h"
#include "hypo/rng.hpp"

using namespace hypo;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and copies share numbers") {
  RandomStream a(7, 3), b(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream c = a;
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == c.normal());
}

TEST_CASE("substreams and splits differ") {
  RandomStream a(7, 0), b(7, 1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 50; ++i) {
    seen.insert(a.next_u64());
    seen.insert(b.next_u64());
  }
  CHECK(seen.size() == 100);
  const RandomStream base(11, 0);
  CHECK(base.split(4).key() == base.split(4).key());
  RandomStream s1 = base.split(1), s2 = base.split(2);
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("derive_key depends on seed and id") {
  CHECK(RandomStream::derive_key(42, "a#0") == RandomStream::derive_key(42, "a#0"));
  CHECK(RandomStream::derive_key(42, "a#0") != RandomStream::derive_key(42, "a#1"));
  CHECK(RandomStream::derive_key(42, "a#0") != RandomStream::derive_key(43, "a#0"));
}

TEST_CASE("uniform and normal moments") {
  RandomStream r(123, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sn4 = 0, umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    sn4 += z * z * z * z;
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  CHECK(std::abs(su / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 5 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(sn4 / n - 3.0) < 5 * std::sqrt(96.0 / n));
}
