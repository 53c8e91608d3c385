#include "ovpframe/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "ovpframe/duality.hpp"
#include "ovpframe/frames.hpp"
#include "ovpframe/generate.hpp"
#include "ovpframe/perturb.hpp"
#include "ovpframe/random.hpp"
#include "ovpframe/transforms.hpp"

namespace ovp {

namespace {

struct Outcome {
  bool pass = true;
  double residual = 0.0;
  std::string note;
};

// A checker rejected its input through an expected error path.
struct Rejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Outcome verdict(bool pass, double residual, const std::string &note = "") {
  return Outcome{pass, residual, pass ? "" : note};
}

struct Ctx {
  const VerifyConfig &vc;
  const Config &cfg;
};

constexpr double kSeqExps[] = {1.0, 1.5, 2.0, 3.0, 64.0};
constexpr double kNormExps[] = {1.0, 1.5, 2.0, 3.0, kInf};

// Random shape with N e >= n_factor * d.
GenSpec draw_spec(CounterRng &rng, const Ctx &c, GenKind kind, Index n_factor = 1) {
  GenSpec s;
  s.seed = rng.next_u64();
  s.kind = kind;
  s.p = kSeqExps[rng.index(5)];
  s.r_x = kNormExps[rng.index(5)];
  s.r_y = kNormExps[rng.index(5)];
  s.d = rng.range(1, c.vc.max_d);
  s.e = rng.range(1, c.vc.max_e);
  const Index nmin = n_factor * ((s.d + s.e - 1) / s.e);
  s.N = rng.range(nmin, std::max(nmin, c.vc.max_N));
  return s;
}

double rel(double err, const Matrix &ref) { return err / (1.0 + max_abs(ref)); }

double frame_diff(const FramePair &f, const FramePair &g) {
  double r = 0.0;
  for (Index n = 0; n < f.N(); ++n) {
    r = std::max(r, max_abs(f.A[n] - g.A[n]));
    r = std::max(r, max_abs(f.Psi[n] - g.Psi[n]));
  }
  return r;
}

Index rank_of(const Matrix &M) {
  Eigen::ColPivHouseholderQR<Matrix> qr(M);
  qr.setThreshold(1e-10);
  return qr.rank();
}

Matrix block_diag(const Matrix &L, const Matrix &R) {
  Matrix M = Matrix::Zero(L.rows() + R.rows(), L.cols() + R.cols());
  M.topLeftCorner(L.rows(), L.cols()) = L;
  M.bottomRightCorner(R.rows(), R.cols()) = R;
  return M;
}

FramePair scaled_synthesis(const FramePair &g, double s) {
  FramePair h = g;
  for (Matrix &P : h.Psi) P *= s;
  return h;
}

////////////////////////////////////////////////////////////////////////////////
// checkers: one random instance each; `counterfeit` swaps in a tampered
// object that the checker must reject.
////////////////////////////////////////////////////////////////////////////////

Outcome chk_factorization(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const FramePair f = generate(draw_spec(rng, c, GenKind::Generic)).f;
  Matrix S = frame_operator(f).entries;
  if (counterfeit) S(0, 0) += 1e-6;
  const Matrix TA = analysis_matrix(f), TPsi = synthesis_matrix(f);
  const double r = rel(max_abs(S - TPsi * TA), S);
  bool ok = r <= 1e-12;
  // frames: theta_A injective, theta_Psi surjective
  ok = ok && rank_of(TA) == f.d() && rank_of(TPsi) == f.d();
  return verdict(ok, r, "S differs from theta_Psi theta_A or rank deficient");
}

Outcome chk_projection(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const FramePair f = generate(draw_spec(rng, c, GenKind::Generic)).f;
  Matrix P = projection_P(f, c.cfg).entries;
  if (counterfeit) P *= 2.0;
  const Matrix TA = analysis_matrix(f), TPsi = synthesis_matrix(f);
  const double r = std::max({max_abs(P * P - P), max_abs(P * TA - TA), max_abs(TPsi * P - TPsi)});
  return verdict(r <= 1e-10, r, "P is not a projection fixing theta_A");
}

Outcome chk_canonical_dual(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const FramePair f = generate(draw_spec(rng, c, GenKind::Generic)).f;
  FramePair g = canonical_dual(f, c.cfg);
  const double inv = frame_diff(canonical_dual(g, c.cfg), f);
  if (counterfeit) g.A[0](0, 0) += 1e-3;
  const DualCertificate dc = is_dual(f, g, 1e-10);
  const FrameBounds fb = frame_bounds(f, c.cfg), gb = frame_bounds(g, c.cfg);
  const bool inside = gb.a.lower >= (1.0 / fb.b.upper) * (1 - 1e-9) &&
                      gb.b.upper <= (1.0 / fb.a.lower) * (1 + 1e-9);
  const double r = std::max({inv, dc.residual_left, dc.residual_right});
  return verdict(inv <= 1e-10 && dc.verdict && inside, r,
                 inside ? "involution or duality residual too large" : "bounds outside [1/b, 1/a]");
}

Outcome chk_uv_roundtrip(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const FramePair f = generate(draw_spec(rng, c, GenKind::Generic)).f;
  auto [U, V] = to_UV(f);
  if (counterfeit) U(0, 0) += 1e-3;
  const FramePair h = from_UV(U, V, f.block_space(), f.X);
  const double r1 = frame_diff(h, f);
  const double r2 = rel(max_abs(frame_operator(h).entries - V * U), V * U);
  // the other direction on arbitrary (U, V)
  const Matrix U2 = rng.matrix(U.rows(), U.cols()), V2 = rng.matrix(V.rows(), V.cols());
  auto [U3, V3] = to_UV(from_UV(U2, V2, f.block_space(), f.X));
  const bool exact = r1 == 0.0 && U3 == U2 && V3 == V2;
  return verdict(exact && r2 <= 1e-12, std::max(r1, r2), "from_UV / to_UV not inverse");
}

Outcome chk_riesz(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const bool want_riesz = !counterfeit && rng.index(2) == 0;
  GenSpec s = draw_spec(rng, c, want_riesz ? GenKind::Riesz : GenKind::Generic);
  if (want_riesz) {  // keep the square block space small
    s.e = rng.range(1, std::min<Index>(c.vc.max_e, 3));
    s.N = rng.range(1, std::max<Index>(1, 9 / s.e));
  } else if (s.N * s.e == s.d) {
    s.N += 1;  // N e > d, so P has rank d < N e
  }
  const FramePair f = generate(s).f;
  const bool expected = counterfeit ? true : want_riesz;
  const FrameClass fc = classify(f, c.cfg);
  auto [U, V] = to_UV(f);
  const Matrix M = U * invert(Matrix(V * U), c.cfg) * V;
  const double r = max_abs(M - Matrix::Identity(M.rows(), M.cols()));
  const bool agree = (r <= c.cfg.residual_tol) == fc.riesz && fc.riesz == expected;
  return verdict(agree, expected ? r : 0.0, "Riesz classification disagrees with U(VU)^{-1}V = I");
}

Outcome chk_restriction(CounterRng &rng, const Ctx &c, bool counterfeit) {
  GenSpec s = draw_spec(rng, c, GenKind::Symmetric);
  const FramePair sym = generate(s).f;
  const Index d = sym.d();
  double worst = 0.0;

  // Parseval in, Parseval out, for an orthogonal projection of random rank
  const FramePair pf = parsevalize(sym, c.cfg);
  const Index k = rng.range(1, d);
  const Matrix Q = range_basis(rng.matrix(d, k));
  Matrix P = Q * Q.transpose();
  if (counterfeit) P *= 2.0;
  FramePair fr;
  try {
    fr = restrict_to(pf, P, Q);
  } catch (const NotAProjection &e) {
    throw Rejected(e.what());
  }
  worst = max_abs(frame_operator(fr).entries - Matrix::Identity(fr.d(), fr.d()));

  // spectral projection of a symmetric S: the restricted inverse is the
  // compression of S^{-1}
  const Matrix S = frame_operator(sym).entries;
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  const Matrix E = es.eigenvectors().leftCols(k);
  const Matrix Pk = E * E.transpose();
  const FramePair fk = restrict_to(sym, Pk, E);
  const Matrix Eplus = (E.transpose() * E).ldlt().solve(E.transpose());
  const Matrix comp = Eplus * Pk * invert(S, c.cfg) * Pk * E;
  const Matrix Sk_inv = invert(frame_operator(fk).entries, c.cfg);
  worst = std::max(worst, rel(max_abs(Sk_inv - comp), comp));

  // P = I leaves the frame alone
  const Matrix I = Matrix::Identity(d, d);
  worst = std::max(worst, frame_diff(restrict_to(sym, I, I), sym));
  return verdict(worst <= 1e-10, worst, "restricted frame operator mismatch");
}

Outcome chk_completion(CounterRng &rng, const Ctx &c, bool counterfeit) {
  GenSpec s = draw_spec(rng, c, GenKind::Generic);
  s.e = std::max(s.e, s.d);  // I - S factors through Y
  s.N = std::max<Index>(s.N, 1);
  const FramePair f = generate(s).f;
  const Index d = f.d(), e = f.e();
  const Matrix M = Matrix::Identity(d, d) - frame_operator(f).entries;
  const Matrix W = random_invertible(rng, e);
  Matrix top = Matrix::Zero(e, d);
  top.topRows(d) = M;
  const Matrix B = W * top;
  Matrix Phi = Matrix::Zero(d, e);
  Phi.leftCols(d).setIdentity();
  Phi = Phi * invert(W, c.cfg);
  if (counterfeit) Phi *= 1.01;
  FramePair g;
  try {
    g = complete_to_parseval(f, B, Phi, 1e-9);
  } catch (const FactorizationMismatch &ex) {
    throw Rejected(ex.what());
  }
  const FrameClass gc = classify(g, 1e-10, c.cfg);
  return verdict(gc.parseval && g.N() == f.N() + 1, gc.parseval_residual, "completion not Parseval");
}

// Violations of ||x_k - x|| <= ratio^k ||x|| + 1e-12 ||x||.
int iteration_violations(const std::vector<double> &errors, double ratio, double nx) {
  int v = 0;
  double bound = nx;
  for (double err : errors) {
    bound *= ratio;
    if (err > bound + 1e-12 * nx) ++v;
  }
  return v;
}

Outcome chk_iteration(CounterRng &rng, const Ctx &c, bool counterfeit) {
  GenSpec s = draw_spec(rng, c, GenKind::Symmetric);
  s.r_x = 2.0;
  const FramePair f = generate(s).f;
  double worst = 0.0;
  bool ok = true;
  for (int v = 0; v < 3; ++v) {
    const Vector x = rng.vector(f.d());
    const Reconstruction rec = iterative_reconstruct(f, x, 30, c.cfg);
    const double nx = Space(f.X).norm(x);
    std::vector<double> errs = rec.errors;
    if (counterfeit) errs[0] = nx;  // a first step that did nothing
    ok = ok && rec.guaranteed && iteration_violations(errs, rec.ratio, nx) == 0;
    double bound = nx;
    for (double err : errs) {
      bound *= rec.ratio;
      worst = std::max(worst, (err - bound) / nx);
    }
  }
  return verdict(ok, std::max(worst, 0.0), "iteration error exceeds the certified rate");
}

Outcome chk_all_duals(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const FramePair f = generate(draw_spec(rng, c, GenKind::Generic)).f;
  const Index d = f.d(), M = f.N() * f.e();
  double worst = 0.0;
  bool ok = true;

  // U = V = 0 gives the canonical dual
  const FramePair g0 = dual_from_params(f, Matrix::Zero(M, d), Matrix::Zero(d, M), c.cfg);
  worst = frame_diff(g0, canonical_dual(f, c.cfg));

  // random parameters give duals
  for (int attempt = 0; attempt < 20; ++attempt) {
    try {
      const FramePair g = dual_from_params(f, 0.5 * rng.matrix(M, d), 0.5 * rng.matrix(d, M), c.cfg);
      const DualCertificate dc = is_dual(f, g, 1e-10);
      ok = ok && dc.verdict;
      worst = std::max({worst, dc.residual_left, dc.residual_right});
      break;
    } catch (const SingularOperator &) {
    }
  }

  // an independently built dual is reproduced from its own parameters
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Matrix TA = analysis_matrix(f), TPsi = synthesis_matrix(f);
    const Matrix W = random_invertible(rng, M);
    const Matrix TB = W * TA * invert(Matrix(TPsi * W * TA), c.cfg);
    const Matrix G = rng.matrix(d, M);
    const Matrix TPhi = invert(Matrix(G * TA), c.cfg) * G;
    FramePair g = from_UV(TB, TPhi, f.block_space(), f.X);
    if (counterfeit) g.A[0](0, 0) += 1e-3;
    const DualCertificate dc = is_dual(f, g, 1e-10);
    if (!dc.verdict) return verdict(false, std::max(dc.residual_left, dc.residual_right), "constructed pair is not dual");
    try {
      auto [U, V] = params_of_dual(g);
      const double r = frame_diff(dual_from_params(f, U, V, c.cfg), g);
      worst = std::max(worst, r);
      ok = ok && r <= 1e-10;
      break;
    } catch (const SingularOperator &) {
      // g is dual but not itself a frame; draw again
    }
  }
  return verdict(ok && worst <= 1e-10, worst, "dual parametrisation failed");
}

Outcome chk_orthogonal(CounterRng &rng, const Ctx &c, bool counterfeit) {
  GenSpec s = draw_spec(rng, c, GenKind::OrthogonalPair, 2);
  const Generated gen = generate(s);
  const FramePair f = gen.f;
  const FramePair g = counterfeit ? gen.f : *gen.g;
  const Index d = f.d();
  const Matrix I = Matrix::Identity(d, d);
  double worst = 0.0;
  try {
    // direct sum
    const FramePair ds = direct_sum(f, g, 1e-9);
    const Matrix Sd = block_diag(frame_operator(f).entries, frame_operator(g).entries);
    worst = rel(max_abs(frame_operator(ds).entries - Sd), Sd);
    // common dual
    const FramePair cd = common_dual(f, g, 1e-9, c.cfg);
    const DualCertificate c1 = is_dual(f, cd, 1e-10), c2 = is_dual(g, cd, 1e-10);
    worst = std::max({worst, c1.residual_left, c1.residual_right, c2.residual_left, c2.residual_right});
    // interpolation of the Parseval versions
    const FramePair pf = parsevalize(f, c.cfg), pg = parsevalize(g, c.cfg);
    const Matrix C = rng.matrix(d, d), E = rng.matrix(d, d);
    const Matrix D = random_invertible(rng, d);
    const Matrix F = (I - E * C) * invert(D, c.cfg);
    const FramePair h = interpolate_orthogonal(pf, pg, C, D, E, F, 1e-9);
    worst = std::max(worst, max_abs(frame_operator(h).entries - I));
    const double q = 1.0 / std::sqrt(2.0);
    const FramePair hs = interpolate_orthogonal(pf, pg, q * I, q * I, q * I, q * I, 1e-9);
    worst = std::max(worst, max_abs(frame_operator(hs).entries - I));
  } catch (const NotOrthogonal &e) {
    throw Rejected(e.what());
  }
  return verdict(worst <= 1e-10, worst, "orthogonal construction residual too large");
}

Outcome chk_tensor(CounterRng &rng, const Ctx &c, bool counterfeit) {
  GenSpec s = draw_spec(rng, c, GenKind::Generic);
  s.d = rng.range(1, 3);
  s.e = rng.range(1, 3);
  s.N = rng.range((s.d + s.e - 1) / s.e, 4);
  GenSpec t = s;
  t.seed = rng.next_u64();
  t.d = rng.range(1, 3);
  t.e = rng.range(1, 3);
  t.N = rng.range((t.d + t.e - 1) / t.e, 4);
  const FramePair f = generate(s).f, g = generate(t).f;
  const FramePair fg = tensor_product(f, g);
  const Matrix Sf = frame_operator(f).entries, Sg = frame_operator(g).entries;
  // Kronecker oracle, entry by entry
  Matrix K(Sf.rows() * Sg.rows(), Sf.cols() * Sg.cols());
  for (Index i = 0; i < Sf.rows(); ++i)
    for (Index j = 0; j < Sf.cols(); ++j)
      for (Index k = 0; k < Sg.rows(); ++k)
        for (Index l = 0; l < Sg.cols(); ++l) K(i * Sg.rows() + k, j * Sg.cols() + l) = Sf(i, j) * Sg(k, l);
  if (counterfeit) K(0, 0) += 1e-6;
  const double r = max_abs(frame_operator(fg).entries - K) / (1.0 + max_abs(K));
  const FrameClass pc = classify(tensor_product(parsevalize(f, c.cfg), parsevalize(g, c.cfg)), c.cfg);
  return verdict(r <= 1e-12 && pc.parseval, r, "tensor frame operator is not the Kronecker product");
}

Outcome chk_approx_dual(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const Generated gen = generate(draw_spec(rng, c, GenKind::ApproxDualPair));
  const FramePair &f = gen.f;
  const FramePair g = counterfeit ? scaled_synthesis(*gen.g, 3.0) : *gen.g;
  const ApproxDualCertificate ac = is_approx_dual(f, g, c.cfg);
  if (!ac.verdict) throw Rejected("not an approximate dual");
  auto [df, dg] = exact_dual_from_approx(f, g, c.cfg);
  const DualCertificate c1 = is_dual(f, df, 1e-9), c2 = is_dual(g, dg, 1e-9);
  double worst = std::max({c1.residual_left, c1.residual_right, c2.residual_left, c2.residual_right});
  // scaling an exact dual by U, V near I gives gaps ||I - U||, ||I - V||
  const Index d = f.d();
  const Matrix K = rng.matrix(d, d);
  const double nk = operator_norm(K, Space(f.X), Space(f.X), c.cfg).upper;
  const Matrix U = Matrix::Identity(d, d) - (0.3 / nk) * K;
  const FramePair h = approx_dual_from_scaled(f, canonical_dual(f, c.cfg), U, Matrix::Identity(d, d), c.cfg);
  const ApproxDualCertificate hc = is_approx_dual(f, h, c.cfg);
  const bool ok = ac.samples_ok && c1.verdict && c2.verdict && hc.verdict && hc.gap_left.upper <= 1e-9 &&
                  hc.gap_right.lower <= 0.3 * (1 + 1e-9);
  return verdict(ok, worst, "approximate duality chain failed");
}

Outcome chk_neumann(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const Generated gen = generate(draw_spec(rng, c, GenKind::ApproxDualPair));
  const FramePair g = counterfeit ? scaled_synthesis(*gen.g, 3.0) : *gen.g;
  double worst = -kInf;
  bool ok = true;
  for (int N = 0; N <= 10; ++N) {
    NeumannDual nd = [&] {
      try {
        return neumann_truncated_dual(gen.f, g, N, c.cfg);
      } catch (const NotApproxDual &e) {
        throw Rejected(e.what());
      }
    }();
    ok = ok && nd.bounds_ok;
    if (N == 0) ok = ok && frame_diff(nd.pair, g) == 0.0;
    worst = std::max({worst, nd.gap_left.lower - nd.bound_left, nd.gap_right.lower - nd.bound_right});
  }
  return verdict(ok, std::max(worst, 0.0), "Neumann gap exceeds base^(N+1)");
}

Outcome chk_perturbed_approx(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const Generated gen = generate(draw_spec(rng, c, GenKind::PerturbationFamily));
  const FramePair &ref = gen.f;
  const FramePair dual = counterfeit ? scaled_synthesis(canonical_dual(ref, c.cfg), 2.0)
                                     : canonical_dual(ref, c.cfg);
  const FrameBounds db = frame_bounds(canonical_dual(ref, c.cfg), c.cfg);
  const double eps = 0.5 / std::max(db.c.upper, db.d.upper) * rng.uniform(0.1, 1.0);
  const FramePair f = perturbation_member(ref, *gen.g, eps);
  PerturbedApproxReport rep;
  try {
    rep = perturbed_approx_dual_check(f, ref, dual, 1e-9, c.cfg);
  } catch (const PreconditionFailed &e) {
    throw Rejected(e.what());
  }
  const double r = std::max(rep.certificate.gap_left.lower, rep.certificate.gap_right.lower);
  return verdict(rep.hypothesis && rep.verdict, r, "perturbed pair is not an approximate dual");
}

Outcome chk_similarity(CounterRng &rng, const Ctx &c, bool counterfeit) {
  GenSpec s = draw_spec(rng, c, GenKind::Generic);
  if (s.N * s.e == s.d) s.N += 1;  // otherwise every frame has P = I
  const FramePair f = generate(s).f;
  const Index d = f.d();
  const Matrix R0 = random_invertible(rng, d), L0 = random_invertible(rng, d);
  FramePair g = similar_transform(f, R0, L0, c.cfg);
  if (counterfeit) g.A[0](0, 0) += 1e-3;
  SimilarityWitness w;
  try {
    w = recover_similarity(f, g, 1e-9, c.cfg);
  } catch (const NotSimilar &e) {
    throw Rejected(e.what());
  }
  double worst = std::max(max_abs(w.R - R0), max_abs(w.L - L0));
  bool ok = is_similar(f, g, 1e-9, c.cfg) && !is_orthogonal(f, g, 1e-9).verdict;

  // canonical dual: R = L = S^{-1}
  const Matrix Sinv = invert(frame_operator(f).entries, c.cfg);
  const SimilarityWitness wc = recover_similarity(f, canonical_dual(f, c.cfg), 1e-9, c.cfg);
  worst = std::max({worst, rel(max_abs(wc.R - Sinv), Sinv), rel(max_abs(wc.L - Sinv), Sinv)});

  // an unrelated frame: P differs and no witness exists
  GenSpec t = s;
  t.seed = rng.next_u64();
  const FramePair h = generate(t).f;
  bool refused = false;
  try {
    recover_similarity(f, h, 1e-9, c.cfg);
  } catch (const NotSimilar &) {
    refused = true;
  }
  ok = ok && refused && !is_similar(f, h, 1e-9, c.cfg);
  return verdict(ok && worst <= 1e-10, worst, "similarity witness or P-equivalence failed");
}

Outcome chk_dilation(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const FramePair f = generate(draw_spec(rng, c, GenKind::Generic)).f;
  Dilation dil = dilate(f, c.cfg);
  if (counterfeit) dil.dilated.A[0](0, 0) += 1e-3;
  bool exact = true;
  for (Index n = 0; n < f.N(); ++n) exact = exact && Matrix(dil.dilated.A[n] * dil.embed) == f.A[n];
  const Index w = dil.W_basis.cols();
  const FrameClass dc = classify(dil.dilated, 1e-9, c.cfg);
  const Matrix Sd = block_diag(frame_operator(f).entries, Matrix::Identity(w, w));
  const double rs = max_abs(frame_operator(dil.dilated).entries - Sd);
  const bool ok = exact && dc.riesz && rs <= 1e-10 && w == f.N() * f.e() - f.d();
  return verdict(ok, std::max(dc.riesz_residual, rs), exact ? "dilation is not a Riesz basis" : "B_n embed != A_n");
}

Outcome chk_hilding(CounterRng &rng, const Ctx &c, bool counterfeit) {
  const Index d = rng.range(1, c.vc.max_d);
  const Space X = SpaceDesc::make(d, kNormExps[rng.index(5)]);
  const Space Y = SpaceDesc::make(d, kNormExps[rng.index(5)]);
  const Matrix U = random_invertible(rng, d);
  const double alpha = rng.uniform(0.05, 0.6), beta = rng.uniform(0.0, 0.5);
  Matrix V;
  if (counterfeit) {
    V = U;
    if (d == 1) {
      V.setZero();
    } else {
      V.col(d - 1) = V.leftCols(d - 1) * rng.vector(d - 1);
    }
  } else {
    Matrix G = rng.matrix(d, d);
    G *= 0.9 * alpha / operator_norm(G, Y, Y, c.cfg).upper;
    V = U + G * U;
  }
  const PerturbCertificate pc = hilding_assess(Operator(U, X, Y), Operator(V, X, Y), alpha, beta, c.cfg);
  if (!pc.hypothesis_ok) throw Rejected(pc.reason);
  const bool ok = pc.perturbed_invertible && pc.bounds_respected;
  // V = 0.9 U meets the hypothesis with alpha = 0.1, beta = 0
  const PerturbCertificate p9 =
      hilding_assess(Operator(U, X, Y), Operator(Matrix(0.9 * U), X, Y), 0.1, 0.0, c.cfg, 100);
  return verdict(ok && p9.hypothesis_ok && p9.bounds_respected, pc.measured_inverse_norm * pc.lower_bound,
                 "Hilding conclusions violated");
}

// eps sweep over one perturbation family; hypothesis_ok must imply an
// invertible perturbed operator inside the certified bounds.
Outcome sweep(CounterRng &rng, const Ctx &c, bool counterfeit, bool pair) {
  const Generated gen = generate(draw_spec(rng, c, GenKind::PerturbationFamily));
  const int variant = 1 + static_cast<int>(rng.index(4));
  // variants 3 and 4 compare S^{-1} Psi_n A_n with Psi_n A_n S^{-1}, which
  // only vanish together at eps = 0 when S commutes with every term
  const FramePair f = pair && variant >= 3 ? parsevalize(gen.f, c.cfg) : gen.f;
  const FramePair &dir = *gen.g;
  if (counterfeit) {
    FramePair z = f;
    for (Matrix &P : z.Psi) P.setZero();
    for (Matrix &A : z.A) A.setZero();
    const PerturbCertificate pc =
        pair ? perturb_pair_assess(f, z.A, z.Psi, variant, std::nullopt, std::nullopt, c.cfg).cert
             : perturb_synthesis_assess(f, z.Psi, PerturbParams{0, 0, 0.01}, c.cfg, 1000).cert;
    if (!pc.hypothesis_ok) throw Rejected(pc.reason);
    return verdict(false, 0.0, "zero perturbation certified");
  }
  bool ok = true;
  double prev_lower = kInf, worst = 0.0;
  int certified = 0;
  for (int k = 0; k < 20; ++k) {
    const double eps = 1e-3 * std::pow(10.0, 3.5 * k / 19.0);
    const FramePair g = perturbation_member(f, dir, eps);
    const FramePair sg = [&] {
      FramePair h = f;
      h.Psi = g.Psi;
      return h;
    }();
    const PerturbCertificate pc =
        pair ? perturb_pair_assess(f, g.A, g.Psi, variant, std::nullopt, std::nullopt, c.cfg).cert
             : perturb_synthesis_assess(f, sg.Psi, std::nullopt, c.cfg).cert;
    if (!pc.hypothesis_ok) continue;
    ++certified;
    ok = ok && pc.perturbed_invertible && pc.bounds_respected;
    ok = ok && pc.lower_bound <= prev_lower * (1 + 1e-12);
    prev_lower = pc.lower_bound;
    if (pc.perturbed_invertible) {
      worst = std::max(worst, pc.measured_inverse_norm * pc.lower_bound);
      worst = std::max(worst, pc.measured_norm / pc.upper_bound);
    }
  }
  return verdict(ok && certified > 0, worst,
                 certified ? "certified perturbation violated its bounds" : "no eps certified");
}

Outcome chk_perturb_synthesis(CounterRng &rng, const Ctx &c, bool counterfeit) {
  return sweep(rng, c, counterfeit, false);
}

Outcome chk_perturb_pair(CounterRng &rng, const Ctx &c, bool counterfeit) {
  return sweep(rng, c, counterfeit, true);
}

using Checker = Outcome (*)(CounterRng &, const Ctx &, bool);

struct Theorem {
  TheoremInfo info;
  Checker check;
};

const std::vector<Theorem> &theorems() {
  static const std::vector<Theorem> list = {
      {{"all_duals", "every dual arises from the right/left-inverse parametrisation"}, chk_all_duals},
      {{"approx_dual", "approximate duals yield exact duals of both frames"}, chk_approx_dual},
      {{"canonical_dual", "canonical dual is an involutive dual with reciprocal bounds"}, chk_canonical_dual},
      {{"completion", "a Bessel pair with I - S = Phi B completes to a Parseval frame"}, chk_completion},
      {{"dilation", "every frame dilates to a Riesz basis restricting to A_n"}, chk_dilation},
      {{"factorization", "S = theta_Psi theta_A with injective analysis, surjective synthesis"}, chk_factorization},
      {{"hilding", "relative closeness to an invertible operator preserves invertibility"}, chk_hilding},
      {{"iteration", "the 2/(a+b) iteration converges at rate (b-a)/(b+a)"}, chk_iteration},
      {{"neumann", "truncated Neumann duals close the gap geometrically"}, chk_neumann},
      {{"orthogonal", "orthogonal pairs interpolate, sum directly and share a dual"}, chk_orthogonal},
      {{"perturb_pair", "summed-norm conditions keep perturbed pairs frames"}, chk_perturb_pair},
      {{"perturb_synthesis", "perturbed synthesis keeps a frame with explicit bounds"}, chk_perturb_synthesis},
      {{"perturbed_approx_dual", "Bessel pairs near a frame are approximately dual to its duals"}, chk_perturbed_approx},
      {{"projection", "theta_A S^{-1} theta_Psi projects onto the range of theta_A"}, chk_projection},
      {{"restriction", "projections restrict frames to subspaces"}, chk_restriction},
      {{"riesz", "Riesz exactly when U(VU)^{-1}V = I"}, chk_riesz},
      {{"similarity", "similar frames share P and the witness is unique"}, chk_similarity},
      {{"tensor", "tensor frame operator is the Kronecker product"}, chk_tensor},
      {{"uv", "frames correspond to operator pairs (U, V)"}, chk_uv_roundtrip},
  };
  return list;
}

TheoremRecord run_theorem(const Theorem &t, const VerifyConfig &vc) {
  const auto t0 = std::chrono::steady_clock::now();
  TheoremRecord rec;
  rec.id = t.info.id;
  rec.statement = t.info.statement;
  const Ctx ctx{vc, vc.cfg};
  const CounterRng base(vc.seed, hash_name(t.info.id.c_str()));

  auto note_failure = [&rec](const std::string &msg) {
    ++rec.failures;
    if (rec.first_failure.empty()) rec.first_failure = msg;
  };
  auto run_one = [&](std::uint64_t stream, bool counterfeit) -> Outcome {
    CounterRng rng = base.split(stream);
    try {
      return t.check(rng, ctx, counterfeit);
    } catch (const Rejected &e) {
      return Outcome{false, 0.0, std::string("rejected: ") + e.what()};
    } catch (const std::exception &e) {
      return Outcome{false, kInf, std::string("error: ") + e.what()};
    }
  };

  const bool inject = vc.inject_fault == t.info.id;
  const int n = vc.instances + (inject ? 1 : 0);
  for (int i = 0; i < n; ++i) {
    const bool fake = inject && i == vc.instances;
    const Outcome o = run_one(static_cast<std::uint64_t>(i), fake);
    ++rec.instances;
    if (std::isfinite(o.residual)) rec.worst_residual = std::max(rec.worst_residual, o.residual);
    if (!o.pass) {
      std::ostringstream os;
      os << "instance " << i << (fake ? " (injected counterfeit)" : "") << ": " << o.note;
      note_failure(os.str());
    }
  }

  // negative control: must be rejected through an expected path
  {
    CounterRng rng = base.split(0xc0ffeeULL);
    try {
      const Outcome o = t.check(rng, ctx, true);
      rec.control_detected = !o.pass;
    } catch (const Rejected &) {
      rec.control_detected = true;
    } catch (const std::exception &e) {
      rec.control_detected = false;
      note_failure(std::string("negative control errored: ") + e.what());
    }
    if (!rec.control_detected && rec.first_failure.find("negative control") == std::string::npos)
      note_failure("negative control was accepted");
  }
  rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

int Report::failures() const {
  int f = 0;
  for (const auto &r : records) f += r.failures;
  return f;
}

const std::vector<TheoremInfo> &theorem_catalog() {
  static const std::vector<TheoremInfo> cat = [] {
    std::vector<TheoremInfo> v;
    for (const auto &t : theorems()) v.push_back(t.info);
    return v;
  }();
  return cat;
}

Report verify_all(const VerifyConfig &vc) {
  for (const auto &id : vc.only) {
    const auto &ts = theorems();
    if (std::none_of(ts.begin(), ts.end(), [&](const Theorem &t) { return t.info.id == id; }))
      throw PreconditionFailed("only", "unknown theorem id '" + id + "'");
  }
  Report rep;
  for (const auto &t : theorems()) {
    if (!vc.only.empty() && std::find(vc.only.begin(), vc.only.end(), t.info.id) == vc.only.end())
      continue;
    rep.records.push_back(run_theorem(t, vc));
  }
  std::sort(rep.records.begin(), rep.records.end(),
            [](const TheoremRecord &a, const TheoremRecord &b) { return a.id < b.id; });
  return rep;
}

json report_to_json(const Report &r, bool timing) {
  json recs = json::array();
  for (const auto &t : r.records) {
    json j = {{"id", t.id},
              {"statement", t.statement},
              {"instances", t.instances},
              {"failures", t.failures},
              {"worst_residual", t.worst_residual},
              {"control_detected", t.control_detected}};
    if (!t.first_failure.empty()) j["first_failure"] = t.first_failure;
    if (timing) j["runtime_s"] = t.runtime;
    recs.push_back(std::move(j));
  }
  return json{{"failures", r.failures()}, {"records", recs}};
}

}  // namespace ovp
