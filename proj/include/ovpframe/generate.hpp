#ifndef OVPFRAME_GENERATE_HPP_
#define OVPFRAME_GENERATE_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "ovpframe/frames.hpp"
#include "ovpframe/random.hpp"

namespace ovp {

class GenerationFailed : public OvpError {
 public:
  using OvpError::OvpError;
};

enum class GenKind {
  Generic,
  Parseval,
  Riesz,
  BesselOnly,
  OrthogonalPair,
  ApproxDualPair,
  PerturbationFamily,
  Symmetric,  // Psi_n = A_n^T, so S is symmetric positive definite
};

const char *to_string(GenKind k);
GenKind parse_kind(const std::string &s);  // throws PreconditionFailed

struct GenSpec {
  std::uint64_t seed = 1;
  double p = 2.0;
  Index d = 3;
  Index e = 2;
  Index N = 4;
  GenKind kind = GenKind::Generic;
  double r_x = 2.0;  // norm exponent of X
  double r_y = 2.0;  // norm exponent of Y
};

// Second member is set for the pair kinds: the orthogonal partner, the
// approximate dual, or the perturbation direction.
struct Generated {
  FramePair f;
  std::optional<FramePair> g;
};

// Pure function of the spec. The riesz kind is built on the block space
// itself, so its d is N * e regardless of spec.d.
Generated generate(const GenSpec &spec);

// Psi_n <- S^{-1} Psi_n.
FramePair parsevalize(const FramePair &f, const Config &cfg = {});

// (A_n + eps B_n, Psi_n + eps Phi_n) for a direction dir = (B, Phi).
FramePair perturbation_member(const FramePair &f, const FramePair &dir, double eps);

// Random square matrix with smallest relative LU pivot >= min_pivot.
Matrix random_invertible(CounterRng &rng, Index n, double min_pivot = 0.1);

}  // namespace ovp

#endif  // OVPFRAME_GENERATE_HPP_
