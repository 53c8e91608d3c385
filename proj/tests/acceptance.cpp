// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ovpframe/duality.hpp"
#include "ovpframe/generate.hpp"
#include "ovpframe/perturb.hpp"
#include "ovpframe/transforms.hpp"
#include "ovpframe/verify.hpp"

using namespace ovp;

namespace {

constexpr double kSeqExps[] = {1.0, 1.5, 2.0, 3.0, 64.0};
constexpr double kNormExps[] = {1.0, 1.5, 2.0, 3.0, kInf};

struct Result {
  bool pass = true;
  std::string detail;
};

// d, e <= 8, N <= 16 with N e >= factor * d.
GenSpec draw(CounterRng &rng, GenKind kind, Index factor = 1, Index max_dim = 8) {
  GenSpec s;
  s.seed = rng.next_u64();
  s.kind = kind;
  s.p = kSeqExps[rng.index(5)];
  s.r_x = kNormExps[rng.index(5)];
  s.r_y = kNormExps[rng.index(5)];
  s.d = rng.range(1, max_dim);
  s.e = rng.range(1, max_dim);
  const Index nmin = factor * ((s.d + s.e - 1) / s.e);
  s.N = rng.range(nmin, std::max<Index>(nmin, 16));
  return s;
}

double frame_diff(const FramePair &f, const FramePair &g) {
  double r = 0.0;
  for (Index n = 0; n < f.N(); ++n)
    r = std::max({r, max_abs(f.A[n] - g.A[n]), max_abs(f.Psi[n] - g.Psi[n])});
  return r;
}

std::string fmt(const char *format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof buf, format, ap);
  va_end(ap);
  return buf;
}

Result factorization() {
  CounterRng rng(101, 1);
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    const Matrix S = frame_operator(f).entries;
    const Matrix TT = oracle::matmul(synthesis_matrix(f), analysis_matrix(f));
    const double r = max_abs(S - TT) / (1 + max_abs(S));
    worst = std::max(worst, r);
    bad += r > 1e-12;
  }
  return {bad == 0, fmt("100 instances, worst relative residual %.2e (tol 1e-12)", worst)};
}

Result projection() {
  CounterRng rng(102, 1);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    const Matrix P = projection_P(f).entries, TA = analysis_matrix(f);
    worst = std::max({worst, max_abs(oracle::matmul(P, P) - P), max_abs(oracle::matmul(P, TA) - TA)});
  }
  return {worst <= 1e-10, fmt("100 instances, worst of ||P^2-P||, ||P theta_A - theta_A|| = %.2e (tol 1e-10)", worst)};
}

Result canonical_dual_crit() {
  CounterRng rng(103, 1);
  double inv = 0.0, dual = 0.0;
  int outside = 0;
  for (int i = 0; i < 100; ++i) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    const FramePair g = canonical_dual(f);
    inv = std::max(inv, frame_diff(canonical_dual(g), f));
    const DualCertificate dc = is_dual(f, g, 1e-10);
    dual = std::max({dual, dc.residual_left, dc.residual_right});
    const FrameBounds fb = frame_bounds(f), gb = frame_bounds(g);
    outside += !(gb.a.lower >= (1 / fb.b.upper) * (1 - 1e-9) && gb.b.upper <= (1 / fb.a.lower) * (1 + 1e-9));
  }
  return {inv <= 1e-10 && dual <= 1e-10 && outside == 0,
          fmt("100 instances, involution %.2e, duality %.2e, bounds outside [1/b, 1/a]: %d", inv, dual, outside)};
}

Result iteration() {
  CounterRng rng(104, 1);
  int uncertified = 0, violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    GenSpec s = draw(rng, GenKind::Symmetric);
    s.r_x = 2.0;
    const FramePair f = generate(s).f;
    for (int v = 0; v < 10; ++v) {
      const Vector x = rng.vector(f.d());
      const Reconstruction rec = iterative_reconstruct(f, x, 30);
      uncertified += !rec.guaranteed;
      const double nx = x.norm();
      double bound = nx;
      for (double err : rec.errors) {
        bound *= rec.ratio;
        worst = std::max(worst, (err - bound) / nx);
        violations += err > bound + 1e-12 * nx;
      }
    }
  }
  return {uncertified == 0 && violations == 0,
          fmt("50 frames x 10 vectors x 30 steps, uncertified %d, violations %d, worst excess %.2e ||x||",
              uncertified, violations, std::max(worst, 0.0))};
}

Result all_duals() {
  CounterRng rng(105, 1);
  int param_ok = 0, param_tried = 0, round_ok = 0, round_tried = 0;
  double worst = 0.0;
  while (param_tried < 50) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    const Index M = f.N() * f.e(), d = f.d();
    try {
      const FramePair g = dual_from_params(f, 0.5 * rng.matrix(M, d), 0.5 * rng.matrix(d, M));
      ++param_tried;
      param_ok += is_dual(f, g, 1e-10).verdict;
    } catch (const SingularOperator &) {
      // the parametrised operator pair was not a frame; draw again
    }
  }
  while (round_tried < 50) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    const Index M = f.N() * f.e(), d = f.d();
    const Matrix TA = analysis_matrix(f), TPsi = synthesis_matrix(f);
    const Matrix W = random_invertible(rng, M);
    const Matrix G = rng.matrix(d, M);
    Matrix TB, TPhi;
    try {
      TB = W * TA * invert(Matrix(TPsi * W * TA));
      TPhi = invert(Matrix(G * TA)) * G;
    } catch (const SingularOperator &) {
      continue;
    }
    const FramePair g = from_UV(TB, TPhi, f.block_space(), f.X);
    try {
      auto [U, V] = params_of_dual(g);
      const FramePair back = dual_from_params(f, U, V);
      ++round_tried;
      const double r = frame_diff(back, g);
      worst = std::max(worst, r);
      round_ok += is_dual(f, g, 1e-10).verdict && r <= 1e-10;
    } catch (const SingularOperator &) {
    }
  }
  return {param_ok == 50 && round_ok == 50,
          fmt("parametrised duals %d/50 dual, independent duals %d/50 round-trip (worst %.2e)", param_ok,
              round_ok, worst)};
}

Result dilation() {
  CounterRng rng(106, 1);
  int inexact = 0;
  double pres = 0.0, sres = 0.0;
  for (int i = 0; i < 100; ++i) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    const Dilation dl = dilate(f);
    for (Index n = 0; n < f.N(); ++n) inexact += Matrix(dl.dilated.A[n] * dl.embed) != f.A[n];
    const Index M = f.N() * f.e(), w = dl.W_basis.cols();
    pres = std::max(pres, max_abs(projection_P(dl.dilated).entries - Matrix::Identity(M, M)));
    Matrix blk = Matrix::Identity(f.d() + w, f.d() + w);
    blk.topLeftCorner(f.d(), f.d()) = frame_operator(f).entries;
    sres = std::max(sres, max_abs(frame_operator(dl.dilated).entries - blk));
  }
  return {inexact == 0 && pres <= 1e-9 && sres <= 1e-10,
          fmt("100 instances, inexact restrictions %d, ||P-I|| %.2e (tol 1e-9), ||S_dil - S(+)I|| %.2e (tol 1e-10)",
              inexact, pres, sres)};
}

Result neumann() {
  CounterRng rng(107, 1);
  int bad = 0;
  double worst = -kInf;
  for (int i = 0; i < 50; ++i) {
    const Generated g = generate(draw(rng, GenKind::ApproxDualPair));
    for (int N = 0; N <= 10; ++N) {
      const NeumannDual nd = neumann_truncated_dual(g.f, *g.g, N);
      const double e1 = nd.gap_left.lower - std::pow(nd.base_left.upper, N + 1);
      const double e2 = nd.gap_right.lower - std::pow(nd.base_right.upper, N + 1);
      worst = std::max({worst, e1, e2});
      bad += e1 > 1e-9 || e2 > 1e-9;
    }
  }
  return {bad == 0, fmt("50 pairs x N = 0..10, violations %d, worst gap - base^(N+1) = %.2e (tol 1e-9)", bad, worst)};
}

Result tensor() {
  CounterRng rng(108, 1);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    GenSpec s = draw(rng, GenKind::Generic, 1, 4), t = draw(rng, GenKind::Generic, 1, 4);
    s.N = std::min<Index>(s.N, 6);
    s.N = std::max(s.N, (s.d + s.e - 1) / s.e);
    t.N = std::min<Index>(t.N, 6);
    t.N = std::max(t.N, (t.d + t.e - 1) / t.e);
    t.p = s.p;
    const FramePair f = generate(s).f, g = generate(t).f;
    const Matrix K = oracle::kron(frame_operator(f).entries, frame_operator(g).entries);
    worst = std::max(worst, max_abs(frame_operator(tensor_product(f, g)).entries - K) / (1 + max_abs(K)));
  }
  return {worst <= 1e-12, fmt("50 pairs, worst relative residual %.2e (tol 1e-12)", worst)};
}

Result similarity() {
  CounterRng rng(109, 1);
  double worst = 0.0;
  int pos_ok = 0, neg_ok = 0;
  for (int i = 0; i < 100; ++i) {
    GenSpec s = draw(rng, GenKind::Generic);
    if (s.N * s.e == s.d) s.N += 1;
    const FramePair f = generate(s).f;
    const Matrix R0 = random_invertible(rng, f.d()), L0 = random_invertible(rng, f.d());
    const FramePair g = similar_transform(f, R0, L0);
    bool witness = true;
    try {
      const SimilarityWitness w = recover_similarity(f, g);
      const double r = std::max(max_abs(w.R - R0), max_abs(w.L - L0));
      worst = std::max(worst, r);
      witness = r <= 1e-10;
    } catch (const NotSimilar &) {
      witness = false;
    }
    pos_ok += witness && is_similar(f, g);

    GenSpec t = s;
    t.seed = rng.next_u64();
    const FramePair h = generate(t).f;
    bool refused = false;
    try {
      recover_similarity(f, h);
    } catch (const NotSimilar &) {
      refused = true;
    }
    neg_ok += refused && !is_similar(f, h);
  }
  return {pos_ok == 100 && neg_ok == 100,
          fmt("positive %d/100 (worst witness error %.2e), negative %d/100", pos_ok, worst, neg_ok)};
}

Result perturbation() {
  CounterRng rng(110, 1);
  int certified = 0, violations = 0, families_without = 0;
  auto record = [&](const PerturbCertificate &c) {
    if (!c.hypothesis_ok) return;
    ++certified;
    violations += !(c.perturbed_invertible && c.bounds_respected && c.lower_bound > 0);
  };
  for (int fam = 0; fam < 10; ++fam) {
    const Generated g = generate(draw(rng, GenKind::PerturbationFamily));
    const int variant = 1 + fam % 4;
    const FramePair fp = variant >= 3 ? parsevalize(g.f) : g.f;
    const int before = certified;
    for (int k = 0; k < 20; ++k) {
      const double eps = 1e-3 * std::pow(10.0, 3.5 * k / 19.0);
      record(perturb_synthesis_assess(g.f, perturbation_member(g.f, *g.g, eps).Psi).cert);
      const FramePair h = perturbation_member(fp, *g.g, eps);
      record(perturb_pair_assess(fp, h.A, h.Psi, variant).cert);
    }
    families_without += certified == before;
  }
  for (int i = 0; i < 50; ++i) {
    const Index d = rng.range(1, 8);
    const Space X = SpaceDesc::make(d, kNormExps[rng.index(5)]);
    const Matrix U = random_invertible(rng, d);
    const double alpha = rng.uniform(0.05, 0.6), beta = rng.uniform(0.0, 0.5);
    Matrix G = rng.matrix(d, d);
    G *= 0.9 * alpha / operator_norm(G, X, X).upper;
    record(hilding_assess(Operator(U, X, X), Operator(Matrix(U + G * U), X, X), alpha, beta));
  }
  return {violations == 0 && families_without == 0,
          fmt("10 families x 20 eps (synthesis and pair) + 50 Hilding: %d certified, %d violations", certified,
              violations)};
}

Result orthogonality() {
  CounterRng rng(111, 1);
  double interp = 0.0, dsum = 0.0, cdual = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Generated g = generate(draw(rng, GenKind::OrthogonalPair, 2));
    const FramePair &f = g.f, &h = *g.g;
    const Index d = f.d();
    const Matrix I = Matrix::Identity(d, d);
    const FramePair pf = parsevalize(f), ph = parsevalize(h);
    const Matrix C = rng.matrix(d, d), E = rng.matrix(d, d), D = random_invertible(rng, d);
    const Matrix F = (I - E * C) * invert(D);
    interp = std::max(interp, max_abs(frame_operator(interpolate_orthogonal(pf, ph, C, D, E, F)).entries - I));
    Matrix blk = Matrix::Zero(2 * d, 2 * d);
    blk.topLeftCorner(d, d) = frame_operator(f).entries;
    blk.bottomRightCorner(d, d) = frame_operator(h).entries;
    dsum = std::max(dsum, max_abs(frame_operator(direct_sum(f, h)).entries - blk));
    const FramePair c = common_dual(f, h);
    const DualCertificate c1 = is_dual(f, c), c2 = is_dual(h, c);
    cdual = std::max({cdual, c1.residual_left, c1.residual_right, c2.residual_left, c2.residual_right});
  }
  return {interp <= 1e-10 && dsum <= 1e-10 && cdual <= 1e-10,
          fmt("50 pairs, interpolation %.2e, direct sum %.2e, common dual %.2e (tol 1e-10)", interp, dsum, cdual)};
}

Result negative_controls() {
  int detected = 0, total = 0;
  // one counterfeit per property checker
  VerifyConfig vc;
  vc.instances = 1;
  for (const auto &rec : verify_all(vc).records) {
    ++total;
    detected += rec.control_detected;
  }
  // hand-built counterfeits: tampered dual, non-projection, singular S
  CounterRng rng(112, 1);
  for (int i = 0; i < 20; ++i) {
    const FramePair f = generate(draw(rng, GenKind::Generic)).f;
    FramePair g = canonical_dual(f);
    g.Psi[0](0, 0) += 1e-6;
    ++total;
    detected += !is_dual(f, g, 1e-10).verdict;

    const Index d = f.d();
    const Matrix Q = range_basis(rng.matrix(d, rng.range(1, d)));
    ++total;
    try {
      restrict_to(f, 2.0 * Q * Q.transpose(), Q);
    } catch (const NotAProjection &) {
      ++detected;
    }

    GenSpec bs = draw(rng, GenKind::BesselOnly);
    const FramePair b = generate(bs).f;
    ++total;
    try {
      canonical_dual(b);
    } catch (const SingularOperator &) {
      detected += !classify(b).frame;
    }
  }
  return {detected == total, fmt("%d/%d counterfeits rejected", detected, total)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Result()>>> criteria = {
      {"factorization", factorization},
      {"projection", projection},
      {"canonical dual", canonical_dual_crit},
      {"iteration", iteration},
      {"all-duals completeness", all_duals},
      {"dilation", dilation},
      {"Neumann bounds", neumann},
      {"tensor", tensor},
      {"similarity", similarity},
      {"perturbation soundness", perturbation},
      {"orthogonality constructions", orthogonality},
      {"negative controls", negative_controls},
  };
  int failed = 0, idx = 0;
  for (const auto &[name, fn] : criteria) {
    ++idx;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = fn();
    } catch (const std::exception &e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !r.pass;
    std::printf("%s  %2d %-28s %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", idx, name, r.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
