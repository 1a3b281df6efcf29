// Copyright 2026 The Authors.
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

// Deterministic sampling helpers. std::uniform_int_distribution is
// implementation-defined, so bounded draws are done by rejection here to keep
// outputs identical across standard libraries.

#ifndef GEOSPOT_RNG_HPP_
#define GEOSPOT_RNG_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace geospot {

// FNV-1a, used to fold domain ids into per-domain seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for a per-domain random stream. Depends on the domain id, not on the
// position of the domain in any list, so permuting inputs cannot change which
// rows a domain contributes.
inline std::uint64_t domain_seed(std::uint64_t base_seed, std::string_view domain_id,
                                 std::uint64_t stream_tag = 0) {
  return splitmix64(base_seed ^ fnv1a64(domain_id) ^ stream_tag);
}

// Unbiased draw from [0, bound) by rejection.
inline std::uint64_t bounded_uint64(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t threshold = (0ull - bound) % bound;
  for (;;) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

// k distinct indices from [0, n), ascending. Partial Fisher-Yates, then sort,
// so the result is a subsequence of the original row order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded_uint64(gen, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace geospot

#endif  // GEOSPOT_RNG_HPP_
