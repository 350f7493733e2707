#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mapf {

// Deterministic RNG helpers. std::uniform_int_distribution and std::shuffle
// are implementation-defined, so seeded runs would differ across standard
// libraries; these helpers keep the byte stream identical everywhere.
using Rng = std::mt19937_64;

inline uint64_t rng_below(Rng& rng, uint64_t n) {
  // modulo bias is < n / 2^64, irrelevant at our ranges
  return rng() % n;
}

template <typename T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct values drawn from v (uniform, order = draw order)
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> v, size_t k, Rng& rng) {
  std::vector<T> out;
  out.reserve(k);
  for (size_t i = 0; i < k && i < v.size(); ++i) {
    size_t j = i + static_cast<size_t>(rng_below(rng, v.size() - i));
    std::swap(v[i], v[j]);
    out.push_back(v[i]);
  }
  return out;
}

}  // namespace mapf
