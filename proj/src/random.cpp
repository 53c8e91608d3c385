#include "ovpframe/random.hpp"

#include <cmath>
#include <numbers>

namespace ovp {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_name(const char *name) {
  // FNV-1a, then mixed
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char *c = name; *c; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(key_, stream);
}

std::uint64_t CounterRng::next_u64() {
  return mix64(key_ + 0xd1b54a32d192ed03ULL * ++counter_);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

Index CounterRng::index(Index n) {
  return static_cast<Index>(next_u64() % static_cast<std::uint64_t>(n));
}

Index CounterRng::range(Index lo, Index hi) { return lo + index(hi - lo + 1); }

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector CounterRng::vector(Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

Matrix CounterRng::matrix(Index rows, Index cols, double lo, double hi) {
  Matrix m(rows, cols);
  // row-major fill order, fixed
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
  return m;
}

}  // namespace ovp
