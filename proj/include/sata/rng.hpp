#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sata {

// 64-bit FNV-1a. Used wherever a stable string hash is needed; std::hash is
// implementation-defined and would break cross-platform reproducibility.
uint64_t fnv1a64(std::string_view data);

// Deterministic generator (splitmix64). Every sampling decision in the
// toolkit goes through this class so that a (seed, key) pair reproduces the
// same draws on any platform; std::shuffle and std::*_distribution are
// unspecified across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();
  double next_unit();                 // uniform in [0, 1)
  uint64_t next_below(uint64_t n);    // uniform in [0, n), n > 0
  double next_normal();               // standard normal via Box-Muller
  bool next_bernoulli(double p) { return next_unit() < p; }

  // Fisher-Yates in place.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    if (items.size() < 2) return;
    for (size_t i = items.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(next_below(i + 1));
      if (i != j) std::swap(items[i], items[j]);
    }
  }

  // k distinct indices out of n, in random order.
  std::vector<size_t> sample_indices(size_t n, size_t k);

 private:
  uint64_t state_;
};

// Independent stream for a (seed, key) pair. Parallel workers derive their
// own stream from the item id, so scheduling order cannot change results.
Rng derive_rng(uint64_t seed, std::string_view key);

}  // namespace sata
