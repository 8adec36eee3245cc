// Copyright 2026 The uavicic Authors
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

// Keyed random streams. Every random quantity is drawn from an engine seeded by
// a key derived from (master seed, stream kind, entity ids), so results do not
// depend on the order in which links or snapshots are processed.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uavicic {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  snapshot = 1,
  placement = 2,
  scheduling = 3,
  terrestrial_link = 4,
  uav_link = 5,
  clustering = 6,
};

inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t key = splitmix64(seed);
  for (std::uint64_t p : parts) key = splitmix64(key ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return key;
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0)
      : engine_(derive_key(seed, {static_cast<std::uint64_t>(stream), a, b})) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean, double sigma) { return std::normal_distribution<double>(mean, sigma)(engine_); }
  /// Unit-mean exponential, i.e. |h|^2 of a unit-power Rayleigh coefficient.
  double unit_exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace uavicic
