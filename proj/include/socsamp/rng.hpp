#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace socsamp {

// splitmix64 step; used only to mix user seeds into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (master, a, b, c). Every
// randomized component routes through this so that sweep cells and
// repetitions own disjoint, reproducible streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  s = splitmix64(s) ^ (a * 0xff51afd7ed558ccdULL);
  s = splitmix64(s) ^ (b * 0xc4ceb9fe1a85ec53ULL);
  s = splitmix64(s) ^ (c * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::mt19937_64 engine(splitmix64(s));
  return engine;
}

// One multinomial draw via sequential conditional binomials.
inline std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                                    const std::vector<double>& weights,
                                                    std::mt19937_64& engine) {
  if (weights.empty()) throw std::invalid_argument("sample_multinomial: empty weight vector");
  if (n < 0) throw std::invalid_argument("sample_multinomial: negative count");
  std::vector<std::int64_t> counts(weights.size(), 0);
  double remaining_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(remaining_weight > 0.0))
    throw std::invalid_argument("sample_multinomial: weights must sum to a positive value");
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0.0) throw std::invalid_argument("sample_multinomial: negative weight");
    if (weights[j] > 0.0) last_positive = j;
  }
  std::int64_t remaining = n;
  for (std::size_t j = 0; j < last_positive && remaining > 0; ++j) {
    double p = weights[j] / remaining_weight;
    if (p >= 1.0) {
      counts[j] = remaining;
      remaining = 0;
      break;
    }
    if (p > 0.0) {
      std::binomial_distribution<std::int64_t> binom(remaining, p);
      std::int64_t draw = binom(engine);
      counts[j] = draw;
      remaining -= draw;
    }
    remaining_weight -= weights[j];
    if (remaining_weight <= 0.0) break;
  }
  if (remaining > 0) counts[last_positive] += remaining;
  return counts;
}

}  // namespace socsamp
