#pragma once

#include <cstdint>

#include "randgas/geometry.hpp"

namespace randgas {

// SplitMix64 step: used to expand seeds and to derive independent stream
// seeds (run seed -> realization index -> block index).
std::uint64_t splitmix64(std::uint64_t& state);

// Hash-combine two 64-bit values into a well-mixed stream seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

// xoshiro256++ generator. Small, fast, and fully specified here so that
// sequences are identical across platforms and standard libraries (the
// std:: distributions are implementation-defined, so sampling helpers below
// are spelled out explicitly).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal via the Marsaglia polar method (explicit, portable).
  double normal();
  // Exponential with the given rate.
  double exponential(double rate);
  // Uniformly distributed unit vector.
  Vec3 unit_vector();
  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

} // namespace randgas
