#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ovpframe/generate.hpp"
#include "ovpframe/perturb.hpp"

using namespace ovp;

namespace {

FramePair scalar(double a, double psi) {
  return FramePair::make({Matrix::Constant(1, 1, a)}, {Matrix::Constant(1, 1, psi)}, 2.0,
                         SpaceDesc::make(1, 2.0), SpaceDesc::make(1, 2.0));
}

std::vector<Matrix> one(double v) { return {Matrix::Constant(1, 1, v)}; }

}  // namespace

TEST_CASE("Hilding: V = U") {
  CounterRng rng(1, 1);
  const Matrix U = random_invertible(rng, 4);
  const Space X = SpaceDesc::make(4, 3.0), Y = SpaceDesc::make(4, 1.5);
  const PerturbCertificate c = hilding_check(Operator(U, X, Y), Operator(U, X, Y), 0.0, 0.0);
  CHECK(c.hypothesis_ok);
  CHECK(c.perturbed_invertible);
  CHECK(c.bounds_respected);
  const double inv_upper = operator_norm(invert(U), Y, X).upper;
  CHECK(c.lower_bound == doctest::Approx(1.0 / inv_upper));
  CHECK(c.upper_bound == doctest::Approx(operator_norm(U, X, Y).upper));
}

TEST_CASE("Hilding: V = 0.9 U with alpha = 0.1") {
  CounterRng rng(2, 1);
  const Matrix U = random_invertible(rng, 3);
  const Space X = SpaceDesc::make(3, 2.0);
  const PerturbCertificate c = hilding_check(Operator(U, X, X), Operator(Matrix(0.9 * U), X, X), 0.1, 0.0);
  CHECK(c.hypothesis_ok);
  const double inv_u = operator_norm(invert(U), X, X).upper;
  // measured_inverse_norm is a lower estimate of ||V^{-1}|| = ||U^{-1}|| / 0.9
  CHECK(c.measured_inverse_norm <= inv_u / 0.9 * (1 + 1e-9));
  CHECK(c.measured_inverse_norm == doctest::Approx(inv_u / 0.9).epsilon(1e-9));
  CHECK(c.bounds_respected);
}

TEST_CASE("Hilding: small additive perturbation") {
  CounterRng rng(3, 1);
  for (int i = 0; i < 10; ++i) {
    const Matrix U = random_invertible(rng, 4);
    const double inv_u = operator_norm(invert(U), 2.0, 2.0).upper;
    Matrix E = rng.matrix(4, 4);
    E *= 0.05 / (operator_norm(E, 2.0, 2.0).upper * inv_u);
    const Space X = SpaceDesc::make(4, 2.0);
    const PerturbCertificate c = hilding_check(Operator(U, X, X), Operator(Matrix(U + E), X, X), 0.05, 0.0);
    CHECK(c.perturbed_invertible);
    CHECK(c.bounds_respected);
  }
}

TEST_CASE("Hilding: uncertified and refuted hypotheses") {
  CounterRng rng(4, 1);
  const Matrix U = random_invertible(rng, 3);
  const Space X = SpaceDesc::make(3, 2.0);
  Matrix V = U;
  V.col(2) = V.col(0) + V.col(1);
  const PerturbCertificate c = hilding_assess(Operator(U, X, X), Operator(V, X, X), 0.3, 0.2);
  CHECK_FALSE(c.hypothesis_ok);
  CHECK_FALSE(c.reason.empty());
  CHECK_THROWS_AS(hilding_check(Operator(U, X, X), Operator(V, X, X), 0.3, 0.2), HypothesisNotCertified);
  CHECK_THROWS_AS(hilding_check(Operator(U, X, X), Operator(U, X, X), 1.0, 0.0), PreconditionFailed);
}

TEST_CASE("synthesis perturbation: unchanged synthesis") {
  GenSpec s;
  s.seed = 5;
  const FramePair f = generate(s).f;
  const PerturbResult r = perturb_synthesis(f, f.Psi);
  CHECK(r.cert.synth.gamma == 0.0);
  const FrameBounds b = frame_bounds(f);
  CHECK(r.cert.lower_bound == doctest::Approx(b.a.lower));
  CHECK(r.cert.perturbed_invertible);
  CHECK(r.cert.bounds_respected);
}

TEST_CASE("synthesis perturbation: scalar example") {
  const PerturbResult r = perturb_synthesis(scalar(1.0, 1.0), one(0.5));
  CHECK(r.cert.synth.gamma == doctest::Approx(0.5));
  CHECK(r.cert.checked_condition == doctest::Approx(0.5));
  CHECK(r.cert.lower_bound == doctest::Approx(0.5));
  CHECK(r.cert.upper_bound == doctest::Approx(1.5));
  CHECK(frame_operator(r.perturbed).entries(0, 0) == 0.5);
  CHECK(r.cert.bounds_respected);
}

TEST_CASE("synthesis perturbation: supplied constants") {
  const FramePair f = scalar(1.0, 1.0);
  // the true inequality |1 - 0.5| z <= gamma |z| needs gamma >= 0.5
  const PerturbResult ok = perturb_synthesis_assess(f, one(0.5), PerturbParams{0.0, 0.0, 0.6});
  CHECK(ok.cert.hypothesis_ok);
  const PerturbResult bad = perturb_synthesis_assess(f, one(0.5), PerturbParams{0.0, 0.0, 0.1});
  CHECK_FALSE(bad.cert.hypothesis_ok);
  CHECK_THROWS_AS(perturb_synthesis(f, one(0.5), PerturbParams{0.0, 0.0, 0.1}), HypothesisNotCertified);
  // alpha-only form: |z - 0.5 z| <= 0.5 |z|
  const PerturbResult rel = perturb_synthesis_assess(f, one(0.5), PerturbParams{0.5, 0.0, 0.0});
  CHECK(rel.cert.checked_condition == doctest::Approx(0.5));
}

TEST_CASE("synthesis perturbation: eps sweep is sound") {
  GenSpec s;
  s.kind = GenKind::PerturbationFamily;
  s.p = 1.5;
  s.r_x = 3.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    s.seed = seed;
    const Generated g = generate(s);
    double prev = kInf;
    int certified = 0;
    for (int k = 0; k < 20; ++k) {
      const double eps = 1e-3 * std::pow(10.0, 3.5 * k / 19.0);
      const PerturbResult r = perturb_synthesis_assess(g.f, perturbation_member(g.f, *g.g, eps).Psi);
      if (!r.cert.hypothesis_ok) continue;
      ++certified;
      CHECK(r.cert.perturbed_invertible);
      CHECK(r.cert.bounds_respected);
      CHECK(classify(r.perturbed).frame);
      CHECK(r.cert.lower_bound <= prev * (1 + 1e-12));
      prev = r.cert.lower_bound;
    }
    CHECK(certified > 0);
  }
}

TEST_CASE("pair perturbation: unchanged pair") {
  GenSpec s;
  s.seed = 6;
  const FramePair f = generate(s).f;
  for (int v = 1; v <= 2; ++v) {
    const PerturbResult r = perturb_pair(f, f.A, f.Psi, v);
    CHECK(r.cert.variant_sum == 0.0);
    CHECK(r.cert.bounds_respected);
  }
  // variants 3 and 4 compare S^{-1} Psi_n A_n with Psi_n A_n S^{-1}; their
  // sums vanish at B = A, Phi = Psi only when S commutes with each term
  const FramePair pf = parsevalize(f);
  for (int v = 3; v <= 4; ++v) {
    CHECK(perturb_pair_assess(pf, pf.A, pf.Psi, v).cert.variant_sum <= 1e-12);
    CHECK(perturb_pair_assess(f, f.A, f.Psi, v).cert.variant_sum > 0.0);
  }
}

TEST_CASE("pair perturbation: scalar example") {
  const PerturbResult r = perturb_pair(scalar(1.0, 1.0), one(1.0), one(0.7), 1);
  CHECK(r.cert.variant_sum == doctest::Approx(0.3));
  CHECK(frame_operator(r.perturbed).entries(0, 0) == doctest::Approx(0.7));
  CHECK(r.cert.lower_bound == doctest::Approx(0.7));
  CHECK(r.cert.bounds_respected);
  CHECK(r.cert.invertible_composite == "S_{B,Phi} S^{-1}");
  CHECK_THROWS_AS(perturb_pair(scalar(1.0, 1.0), one(1.0), one(0.7), 5), PreconditionFailed);
  CHECK_THROWS_AS(perturb_pair(scalar(1.0, 1.0), one(0.0), one(0.0), 2), HypothesisNotCertified);
}

TEST_CASE("pair perturbation: eps sweep is sound for every variant") {
  GenSpec s;
  s.kind = GenKind::PerturbationFamily;
  s.d = 3;
  s.e = 2;
  s.N = 5;
  for (int v = 1; v <= 4; ++v) {
    s.seed = static_cast<std::uint64_t>(v);
    const Generated g = generate(s);
    const FramePair f = v >= 3 ? parsevalize(g.f) : g.f;
    int certified = 0;
    for (int k = 0; k < 20; ++k) {
      const double eps = 1e-3 * std::pow(10.0, 3.5 * k / 19.0);
      const FramePair h = perturbation_member(f, *g.g, eps);
      const PerturbResult r = perturb_pair_assess(f, h.A, h.Psi, v);
      if (!r.cert.hypothesis_ok) continue;
      ++certified;
      CHECK(r.cert.perturbed_invertible);
      CHECK(r.cert.bounds_respected);
    }
    CHECK(certified > 0);
  }
}
