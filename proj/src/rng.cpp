#include "sata/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sata {

uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t Rng::next_u64() {
  // splitmix64 (Steele, Lea, Flood 2014).
  state_ += 0x9e3779b97f4a7c15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Rng::next_below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("next_below: n must be positive");
  // Rejection sampling to avoid modulo bias.
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double Rng::next_normal() {
  double u1 = next_unit();
  double u2 = next_unit();
  while (u1 <= 0.0) u1 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<size_t> Rng::sample_indices(size_t n, size_t k) {
  if (k > n) throw std::invalid_argument("sample_indices: k exceeds n");
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  // Partial Fisher-Yates: first k slots end up as the sample.
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

Rng derive_rng(uint64_t seed, std::string_view key) {
  uint64_t mixed = seed ^ (fnv1a64(key) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
  return Rng(mixed);
}

}  // namespace sata
