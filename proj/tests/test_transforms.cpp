#include "doctest.h"
#include "oracles.hpp"
#include "ovpframe/duality.hpp"
#include "ovpframe/generate.hpp"
#include "ovpframe/transforms.hpp"

using namespace ovp;

namespace {

FramePair generic(std::uint64_t seed, Index d = 3, Index e = 2, Index N = 4, double p = 2.0,
                  double rx = 2.0) {
  GenSpec s;
  s.seed = seed;
  s.d = d;
  s.e = e;
  s.N = N;
  s.p = p;
  s.r_x = rx;
  return generate(s).f;
}

double frame_diff(const FramePair &f, const FramePair &g) {
  double r = 0.0;
  for (Index n = 0; n < f.N(); ++n)
    r = std::max({r, max_abs(f.A[n] - g.A[n]), max_abs(f.Psi[n] - g.Psi[n])});
  return r;
}

}  // namespace

TEST_CASE("similar_transform") {
  const FramePair f = generic(1);
  const Matrix I = Matrix::Identity(3, 3);
  CHECK(frame_diff(similar_transform(f, I, I), f) == 0.0);

  // R = S^{-1}, L = I gives a Parseval pair
  const Matrix Sinv = invert(frame_operator(f).entries);
  CHECK(classify(similar_transform(f, Sinv, I)).parseval);

  CounterRng rng(2, 1);
  for (int i = 0; i < 10; ++i) {
    const FramePair g = similar_transform(f, random_invertible(rng, 3), random_invertible(rng, 3));
    CHECK(max_abs(projection_P(g).entries - projection_P(f).entries) <= 1e-10);
  }
  Matrix sing = I;
  sing(2, 2) = 0;
  CHECK_THROWS_AS(similar_transform(f, sing, I), SingularOperator);
}

TEST_CASE("recover_similarity") {
  CounterRng rng(3, 2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const FramePair f = generic(seed, 3, 2, 4, 1.5, 3.0);
    const Matrix R0 = random_invertible(rng, 3), L0 = random_invertible(rng, 3);
    const SimilarityWitness w = recover_similarity(f, similar_transform(f, R0, L0));
    CHECK(max_abs(w.R - R0) <= 1e-10);
    CHECK(max_abs(w.L - L0) <= 1e-10);

    const Matrix Sinv = invert(frame_operator(f).entries);
    const SimilarityWitness wc = recover_similarity(f, canonical_dual(f));
    CHECK(max_abs(wc.R - Sinv) <= 1e-10);
    CHECK(max_abs(wc.L - Sinv) <= 1e-10);

    CHECK_THROWS_AS(recover_similarity(f, generic(seed + 1000, 3, 2, 4, 1.5, 3.0)), NotSimilar);
  }
}

TEST_CASE("is_similar") {
  const FramePair f = generic(4), g = generic(5);
  CHECK(is_similar(f, f));
  CHECK_FALSE(is_similar(f, g));
  CounterRng rng(6, 3);
  const FramePair h = similar_transform(f, random_invertible(rng, 3), random_invertible(rng, 3));
  CHECK(is_similar(f, h));
  CHECK(is_similar(h, f));
  bool witness = true;
  try {
    recover_similarity(f, h);
  } catch (const NotSimilar &) {
    witness = false;
  }
  CHECK(witness);
}

// Equal shapes with N e = d force P = I, so a Riesz basis padded with a
// zero block stands in for the Riesz side.
TEST_CASE("frames with different projections are not similar") {
  GenSpec rs;
  rs.kind = GenKind::Riesz;
  rs.e = 2;
  rs.N = 2;
  const FramePair r = generate(rs).f;  // d = 4
  const FramePair nr = generic(8, 4, 2, 3);
  const FramePair rr = FramePair::make({r.A[0], r.A[1], Matrix::Zero(2, 4)}, {r.Psi[0], r.Psi[1], Matrix::Zero(4, 2)},
                                       r.p, r.X, r.Y);
  Matrix Pr = Matrix::Zero(6, 6);
  Pr.topLeftCorner(4, 4).setIdentity();
  CHECK(max_abs(projection_P(rr).entries - Pr) <= 1e-10);
  CHECK(classify(nr).frame);
  CHECK_FALSE(classify(nr).riesz);
  CHECK_FALSE(is_similar(rr, nr));
  CHECK_THROWS_AS(recover_similarity(rr, nr), NotSimilar);
}

TEST_CASE("dilation") {
  // Riesz input: nothing to add
  GenSpec rs;
  rs.kind = GenKind::Riesz;
  rs.e = 2;
  rs.N = 2;
  const FramePair r = generate(rs).f;
  const Dilation dr = dilate(r);
  CHECK(dr.W_basis.cols() == 0);
  CHECK(dr.dilated.d() == r.d());

  // N = 2, d = 1, A = Psi = (1), (1)
  const FramePair two = FramePair::make({Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                                        {Matrix::Ones(1, 1), Matrix::Ones(1, 1)}, 2.0,
                                        SpaceDesc::make(1, 2.0), SpaceDesc::make(1, 2.0));
  const Dilation d2 = dilate(two);
  CHECK(d2.W_basis.cols() == 1);
  CHECK(d2.dilated.d() == 2);
  CHECK(classify(d2.dilated).riesz);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const FramePair f = generic(seed, 3, 2, 3 + seed % 3, 1.0 + 0.5 * (seed % 4), seed % 2 ? 3.0 : kInf);
    const Dilation d = dilate(f);
    for (Index n = 0; n < f.N(); ++n) CHECK(Matrix(d.dilated.A[n] * d.embed) == f.A[n]);
    const Index w = d.W_basis.cols();
    CHECK(w == f.N() * f.e() - f.d());
    CHECK(max_abs(projection_P(d.dilated).entries - Matrix::Identity(f.N() * f.e(), f.N() * f.e())) <= 1e-9);
    Matrix blk = Matrix::Identity(f.d() + w, f.d() + w);
    blk.topLeftCorner(f.d(), f.d()) = frame_operator(f).entries;
    CHECK(max_abs(frame_operator(d.dilated).entries - blk) <= 1e-10);
    // embed is isometric in the flat coordinates of X (+) W
    const Vector x = Vector::LinSpaced(f.d(), -1.0, 2.0);
    CHECK(Space(d.dilated.X).norm(d.embed * x) == doctest::Approx(Space(f.X).norm(x)));
  }
}
