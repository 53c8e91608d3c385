#ifndef OVPFRAME_RANDOM_HPP_
#define OVPFRAME_RANDOM_HPP_

#include <cstdint>

#include "ovpframe/pspace.hpp"

namespace ovp {

// Counter-based generator: the n-th draw of stream (seed, key) is a pure
// function of (seed, key, n), so independent streams can be split off
// for parallel work without changing any draw.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  // Child stream; does not advance this generator.
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  Index index(Index n);                   // [0, n)
  Index range(Index lo, Index hi);        // [lo, hi]
  double normal();                        // standard normal via Box-Muller

  Vector vector(Index n, double lo = -1.0, double hi = 1.0);
  Matrix matrix(Index rows, Index cols, double lo = -1.0, double hi = 1.0);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit hash of a string, for deriving stream ids from names.
std::uint64_t hash_name(const char *name);

}  // namespace ovp

#endif  // OVPFRAME_RANDOM_HPP_
