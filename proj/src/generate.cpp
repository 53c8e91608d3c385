#include "ovpframe/generate.hpp"

#include <sstream>

#include "ovpframe/duality.hpp"

namespace ovp {

namespace {

constexpr int kBudget = 2000;
constexpr double kMinPivot = 0.1;

// Inverse-residual guard on top of the pivot test.
bool well_conditioned(const Matrix &S) {
  if (smallest_pivot(S) < kMinPivot) return false;
  try {
    invert_checked(S);
  } catch (const SingularOperator &) {
    return false;
  }
  return true;
}

// Random (U, V) with V U well conditioned; rows/columns outside
// [first_block, first_block + nblocks) are zero.
std::pair<Matrix, Matrix> random_UV(CounterRng &rng, Index d, Index e, Index N,
                                    Index first_block, Index nblocks) {
  for (int attempt = 0; attempt < kBudget; ++attempt) {
    Matrix U = Matrix::Zero(N * e, d), V = Matrix::Zero(d, N * e);
    U.middleRows(first_block * e, nblocks * e) = rng.matrix(nblocks * e, d);
    V.middleCols(first_block * e, nblocks * e) = rng.matrix(d, nblocks * e);
    if (well_conditioned(V * U)) return {U, V};
  }
  throw GenerationFailed("could not draw a well-conditioned frame within the resample budget");
}

std::pair<Matrix, Matrix> random_UV(CounterRng &rng, Index d, Index e, Index N) {
  return random_UV(rng, d, e, N, 0, N);
}

}  // namespace

const char *to_string(GenKind k) {
  switch (k) {
    case GenKind::Generic: return "generic";
    case GenKind::Parseval: return "parseval";
    case GenKind::Riesz: return "riesz";
    case GenKind::BesselOnly: return "bessel_only";
    case GenKind::OrthogonalPair: return "orthogonal_pair";
    case GenKind::ApproxDualPair: return "approx_dual_pair";
    case GenKind::PerturbationFamily: return "perturbation_family";
    case GenKind::Symmetric: return "symmetric";
  }
  return "?";
}

GenKind parse_kind(const std::string &s) {
  for (GenKind k : {GenKind::Generic, GenKind::Parseval, GenKind::Riesz, GenKind::BesselOnly,
                    GenKind::OrthogonalPair, GenKind::ApproxDualPair,
                    GenKind::PerturbationFamily, GenKind::Symmetric})
    if (s == to_string(k)) return k;
  throw PreconditionFailed("kind", "unknown generator kind '" + s + "'");
}

Matrix random_invertible(CounterRng &rng, Index n, double min_pivot) {
  for (int attempt = 0; attempt < kBudget; ++attempt) {
    Matrix M = rng.matrix(n, n);
    if (smallest_pivot(M) >= min_pivot) return M;
  }
  throw GenerationFailed("could not draw an invertible matrix within the resample budget");
}

FramePair parsevalize(const FramePair &f, const Config &cfg) {
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  FramePair g = f;
  for (Matrix &P : g.Psi) P = Sinv * P;
  return g;
}

FramePair perturbation_member(const FramePair &f, const FramePair &dir, double eps) {
  require_same_shape(f, dir);
  FramePair g = f;
  for (Index n = 0; n < f.N(); ++n) {
    g.A[n] += eps * dir.A[n];
    g.Psi[n] += eps * dir.Psi[n];
  }
  return g;
}

Generated generate(const GenSpec &spec) {
  if (spec.d < 1 || spec.e < 1 || spec.N < 1)
    throw PreconditionFailed("dims", "d, e and N must be >= 1");
  const SpaceDesc Y = SpaceDesc::make(spec.e, spec.r_y);
  const BlockSpace block = BlockSpace::make(spec.p, spec.N, Y);
  SpaceDesc X = SpaceDesc::make(spec.d, spec.r_x);
  const Index d = spec.d, e = spec.e, N = spec.N;
  CounterRng rng(spec.seed, hash_name(to_string(spec.kind)));

  switch (spec.kind) {
    case GenKind::Generic: {
      auto [U, V] = random_UV(rng, d, e, N);
      return {from_UV(U, V, block, X), std::nullopt};
    }
    case GenKind::Parseval: {
      auto [U, V] = random_UV(rng, d, e, N);
      return {parsevalize(from_UV(U, V, block, X)), std::nullopt};
    }
    case GenKind::Symmetric: {
      if (N * e < d) throw GenerationFailed("symmetric kind needs N e >= d");
      for (int attempt = 0; attempt < kBudget; ++attempt) {
        const Matrix U = rng.matrix(N * e, d);
        if (!well_conditioned(U.transpose() * U)) continue;
        return {from_UV(U, U.transpose(), block, X), std::nullopt};
      }
      throw GenerationFailed("could not draw a well-conditioned symmetric frame");
    }
    case GenKind::Riesz: {
      X = SpaceDesc::make(N * e, spec.r_x);
      for (int attempt = 0; attempt < kBudget; ++attempt) {
        const Matrix U = random_invertible(rng, N * e, kMinPivot);
        const Matrix V = random_invertible(rng, N * e, kMinPivot);
        if (!well_conditioned(V * U)) continue;
        const FramePair f = from_UV(U, V, block, X);
        if (!classify(f).riesz) continue;
        return {f, std::nullopt};
      }
      throw GenerationFailed("could not draw a Riesz basis within the resample budget");
    }
    case GenKind::BesselOnly: {
      Matrix U = rng.matrix(N * e, d), V = rng.matrix(d, N * e);
      // last column a combination of the others, so V U is singular
      if (d == 1) {
        U.setZero();
      } else {
        U.col(d - 1) = U.leftCols(d - 1) * rng.vector(d - 1);
      }
      return {from_UV(U, V, block, X), std::nullopt};
    }
    case GenKind::OrthogonalPair: {
      const Index N1 = N / 2;
      if (N1 < 1 || N1 * e < d || (N - N1) * e < d) {
        std::ostringstream os;
        os << "orthogonal_pair needs floor(N/2) e >= d and (N - floor(N/2)) e >= d (N=" << N
           << ", e=" << e << ", d=" << d << ")";
        throw GenerationFailed(os.str());
      }
      auto [Uf, Vf] = random_UV(rng, d, e, N, 0, N1);
      auto [Ug, Vg] = random_UV(rng, d, e, N, N1, N - N1);
      return {from_UV(Uf, Vf, block, X), from_UV(Ug, Vg, block, X)};
    }
    case GenKind::ApproxDualPair: {
      auto [U, V] = random_UV(rng, d, e, N);
      const FramePair f = from_UV(U, V, block, X);
      const FramePair h = canonical_dual(f);
      Matrix scale[2];
      for (Matrix &M : scale) {
        const Matrix K = rng.matrix(d, d);
        const double nk = operator_norm(K, Space(X), Space(X)).upper;
        const double target = rng.uniform(0.05, 0.5);
        M = Matrix::Identity(d, d) - (target / nk) * K;
      }
      return {f, approx_dual_from_scaled(f, h, scale[0], scale[1])};
    }
    case GenKind::PerturbationFamily: {
      auto [U, V] = random_UV(rng, d, e, N);
      const FramePair f = from_UV(U, V, block, X);
      // direction normalised so both analysis and synthesis parts have
      // certified norm at most 1
      Matrix dU = rng.matrix(N * e, d), dV = rng.matrix(d, N * e);
      dU /= operator_norm(dU, Space(X), Space(block)).upper;
      dV /= operator_norm(dV, Space(block), Space(X)).upper;
      return {f, from_UV(dU, dV, block, X)};
    }
  }
  throw GenerationFailed("unknown kind");
}

}  // namespace ovp
