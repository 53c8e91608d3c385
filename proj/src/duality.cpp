#include "ovpframe/duality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ovpframe/random.hpp"

namespace ovp {

namespace {

Matrix identity(Index d) { return Matrix::Identity(d, d); }

Matrix kron(const Matrix &L, const Matrix &R) {
  Matrix K(L.rows() * R.rows(), L.cols() * R.cols());
  for (Index i = 0; i < L.rows(); ++i)
    for (Index j = 0; j < L.cols(); ++j)
      K.block(i * R.rows(), j * R.cols(), R.rows(), R.cols()) = L(i, j) * R;
  return K;
}

// I - theta_A S^{-1} theta_Psi
Matrix complement_projection(const FramePair &f, const Matrix &Sinv) {
  const Matrix P = analysis_matrix(f) * Sinv * synthesis_matrix(f);
  return Matrix::Identity(P.rows(), P.cols()) - P;
}

void require_orthogonal(const FramePair &f, const FramePair &g, double tol) {
  const DualCertificate oc = is_orthogonal(f, g, tol);
  if (!oc.verdict) {
    std::ostringstream os;
    os << "mixed frame operators are not zero (residuals " << oc.residual_left << ", "
       << oc.residual_right << ")";
    throw NotOrthogonal(os.str());
  }
}

}  // namespace

DualCertificate is_dual(const FramePair &f, const FramePair &g, double tol) {
  require_same_shape(f, g);
  const Index d = f.d();
  DualCertificate c;
  c.residual_left = max_abs(cross_frame_operator(f, g) - identity(d));
  c.residual_right = max_abs(cross_frame_operator(g, f) - identity(d));
  c.verdict = c.residual_left <= tol && c.residual_right <= tol;
  return c;
}

DualCertificate is_orthogonal(const FramePair &f, const FramePair &g, double tol) {
  require_same_shape(f, g);
  DualCertificate c;
  c.residual_left = max_abs(cross_frame_operator(f, g));
  c.residual_right = max_abs(cross_frame_operator(g, f));
  c.verdict = c.residual_left <= tol && c.residual_right <= tol;
  return c;
}

Matrix right_inverse(const FramePair &f, const Eigen::Ref<const Matrix> &U, const Config &cfg) {
  if (U.rows() != f.N() * f.e() || U.cols() != f.d())
    throw DimensionMismatch("U must map X into the block space");
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  return analysis_matrix(f) * Sinv + complement_projection(f, Sinv) * U;
}

Matrix left_inverse(const FramePair &f, const Eigen::Ref<const Matrix> &V, const Config &cfg) {
  if (V.rows() != f.d() || V.cols() != f.N() * f.e())
    throw DimensionMismatch("V must map the block space into X");
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  return Sinv * synthesis_matrix(f) + V * complement_projection(f, Sinv);
}

FramePair dual_from_params(const FramePair &f, const Eigen::Ref<const Matrix> &U,
                           const Eigen::Ref<const Matrix> &V, const Config &cfg) {
  const Matrix R = right_inverse(f, U, cfg);
  const Matrix L = left_inverse(f, V, cfg);
  // the dual must itself be a frame
  invert_checked(L * R, cfg);
  return from_UV(R, L, f.block_space(), f.X);
}

std::pair<Matrix, Matrix> params_of_dual(const FramePair &g) { return to_UV(g); }

FramePair interpolate_orthogonal(const FramePair &f, const FramePair &g,
                                 const Eigen::Ref<const Matrix> &C,
                                 const Eigen::Ref<const Matrix> &D,
                                 const Eigen::Ref<const Matrix> &E,
                                 const Eigen::Ref<const Matrix> &F, double tol) {
  require_same_shape(f, g);
  const Index d = f.d();
  for (Index k : {C.rows(), C.cols(), D.rows(), D.cols(), E.rows(), E.cols(), F.rows(), F.cols()})
    if (k != d) throw DimensionMismatch("C, D, E, F must be d x d");
  const FrameClass cf = classify(f, tol), cg = classify(g, tol);
  if (!cf.parseval) throw PreconditionFailed("f", "not Parseval");
  if (!cg.parseval) throw PreconditionFailed("g", "not Parseval");
  if (!is_orthogonal(f, g, tol).verdict) throw PreconditionFailed("orthogonality", "f and g are not orthogonal");
  const double r = max_abs(E * C + F * D - identity(d));
  if (r > tol) {
    std::ostringstream os;
    os << "||EC + FD - I||_max = " << r;
    throw PreconditionFailed("EC + FD = I", os.str());
  }
  FramePair h = f;
  for (Index n = 0; n < f.N(); ++n) {
    h.A[n] = f.A[n] * C + g.A[n] * D;
    h.Psi[n] = E * f.Psi[n] + F * g.Psi[n];
  }
  return h;
}

FramePair direct_sum(const FramePair &f, const FramePair &g, double tol) {
  require_same_shape(f, g);
  require_orthogonal(f, g, tol);
  const Index d = f.d(), e = f.e();
  std::vector<Matrix> A, Psi;
  for (Index n = 0; n < f.N(); ++n) {
    Matrix a(e, 2 * d);
    a << f.A[n], g.A[n];
    Matrix s(2 * d, e);
    s << f.Psi[n], g.Psi[n];
    A.push_back(std::move(a));
    Psi.push_back(std::move(s));
  }
  const SpaceDesc XX = SpaceDesc::make(2 * d, f.X.norm_exp, f.X.field);
  return FramePair::make(std::move(A), std::move(Psi), f.p, XX, f.Y);
}

FramePair common_dual(const FramePair &f, const FramePair &g, double tol, const Config &cfg) {
  require_same_shape(f, g);
  require_orthogonal(f, g, tol);
  const Matrix Sf = invert(frame_operator(f).entries, cfg);
  const Matrix Sg = invert(frame_operator(g).entries, cfg);
  FramePair h = f;
  for (Index n = 0; n < f.N(); ++n) {
    h.A[n] = f.A[n] * Sf + g.A[n] * Sg;
    h.Psi[n] = Sf * f.Psi[n] + Sg * g.Psi[n];
  }
  return h;
}

FramePair tensor_product(const FramePair &f, const FramePair &g) {
  if (f.p != g.p) throw DimensionMismatch("tensor_product: frames must share p");
  std::vector<Matrix> A, Psi;
  for (Index n = 0; n < f.N(); ++n) {
    for (Index m = 0; m < g.N(); ++m) {
      A.push_back(kron(f.A[n], g.A[m]));
      Psi.push_back(kron(f.Psi[n], g.Psi[m]));
    }
  }
  const SpaceDesc X = SpaceDesc::make(f.d() * g.d(), f.X.norm_exp, f.X.field);
  const SpaceDesc Y = SpaceDesc::make(f.e() * g.e(), f.Y.norm_exp, f.Y.field);
  return FramePair::make(std::move(A), std::move(Psi), f.p, X, Y);
}

ApproxDualCertificate is_approx_dual(const FramePair &f, const FramePair &g, const Config &cfg,
                                     int samples) {
  require_same_shape(f, g);
  const Index d = f.d();
  const Matrix Gl = identity(d) - cross_frame_operator(f, g);
  const Matrix Gr = identity(d) - cross_frame_operator(g, f);
  ApproxDualCertificate c;
  c.gap_left = operator_norm(Gl, f.X, f.X, cfg);
  c.gap_right = operator_norm(Gr, f.X, f.X, cfg);
  c.verdict = c.gap_left.upper < 1.0 && c.gap_right.upper < 1.0;
  if (c.verdict) {
    const Space X = f.X;
    CounterRng rng(cfg.power_seed, hash_name("approx-dual-samples"));
    for (int k = 0; k < samples; ++k) {
      const Vector x = rng.vector(d);
      const double nx = X.norm(x);
      if (nx == 0.0) continue;
      if (!(X.norm(Gl * x) < nx) || !(X.norm(Gr * x) < nx)) c.samples_ok = false;
    }
  }
  return c;
}

std::pair<FramePair, FramePair> exact_dual_from_approx(const FramePair &f, const FramePair &g,
                                                       const Config &cfg) {
  require_same_shape(f, g);
  const Matrix SAPhi_inv = invert(cross_frame_operator(f, g), cfg);
  const Matrix SBPsi_inv = invert(cross_frame_operator(g, f), cfg);
  FramePair dual_f = g, dual_g = f;
  for (Index n = 0; n < f.N(); ++n) {
    dual_f.A[n] = g.A[n] * SBPsi_inv;
    dual_f.Psi[n] = SAPhi_inv * g.Psi[n];
    dual_g.A[n] = f.A[n] * SAPhi_inv;
    dual_g.Psi[n] = SBPsi_inv * f.Psi[n];
  }
  return {dual_f, dual_g};
}

FramePair approx_dual_from_scaled(const FramePair &f, const FramePair &g,
                                  const Eigen::Ref<const Matrix> &U,
                                  const Eigen::Ref<const Matrix> &V, const Config &cfg) {
  require_same_shape(f, g);
  const Index d = f.d();
  if (U.rows() != d || U.cols() != d || V.rows() != d || V.cols() != d)
    throw DimensionMismatch("U and V must be d x d");
  const NormEstimate gu = operator_norm(Matrix(identity(d) - U), f.X, f.X, cfg);
  const NormEstimate gv = operator_norm(Matrix(identity(d) - V), f.X, f.X, cfg);
  if (!(gu.upper < 1.0) || !(gv.upper < 1.0)) {
    std::ostringstream os;
    os << "||I - U|| <= " << gu.upper << ", ||I - V|| <= " << gv.upper << " (need both < 1)";
    throw HypothesisNotCertified(os.str());
  }
  FramePair h = g;
  for (Index n = 0; n < f.N(); ++n) {
    h.A[n] = g.A[n] * U;
    h.Psi[n] = V * g.Psi[n];
  }
  return h;
}

NeumannDual neumann_truncated_dual(const FramePair &f, const FramePair &g, int Ncap,
                                   const Config &cfg) {
  if (Ncap < 0) throw PreconditionFailed("Ncap", "must be >= 0");
  const ApproxDualCertificate ac = is_approx_dual(f, g, cfg);
  if (!ac.verdict) {
    std::ostringstream os;
    os << "gaps " << ac.gap_left.upper << ", " << ac.gap_right.upper << " not both < 1";
    throw NotApproxDual(os.str());
  }
  const Index d = f.d();
  const Matrix TL = identity(d) - cross_frame_operator(f, g);  // I - S_{A,Phi}
  const Matrix TR = identity(d) - cross_frame_operator(g, f);  // I - S_{B,Psi}
  Matrix sum_l = identity(d), sum_r = identity(d), pow_l = identity(d), pow_r = identity(d);
  for (int m = 1; m <= Ncap; ++m) {
    pow_l = pow_l * TL;
    pow_r = pow_r * TR;
    sum_l += pow_l;
    sum_r += pow_r;
  }
  NeumannDual out{g, ac.gap_left, ac.gap_right, {}, {}, 0.0, 0.0, false};
  for (Index n = 0; n < f.N(); ++n) {
    out.pair.A[n] = g.A[n] * sum_r;
    out.pair.Psi[n] = sum_l * g.Psi[n];
  }
  const Matrix GL = identity(d) - cross_frame_operator(f, out.pair);
  const Matrix GR = identity(d) - cross_frame_operator(out.pair, f);
  out.gap_left = operator_norm(GL, f.X, f.X, cfg);
  out.gap_right = operator_norm(GR, f.X, f.X, cfg);
  out.bound_left = std::pow(out.base_left.upper, Ncap + 1);
  out.bound_right = std::pow(out.base_right.upper, Ncap + 1);
  out.bounds_ok = out.gap_left.lower <= out.bound_left + 1e-9 &&
                  out.gap_right.lower <= out.bound_right + 1e-9;
  return out;
}

PerturbedApproxReport perturbed_approx_dual_check(const FramePair &f, const FramePair &ref,
                                                  const FramePair &dual, double tol,
                                                  const Config &cfg) {
  require_same_shape(f, ref);
  require_same_shape(f, dual);
  const DualCertificate dc = is_dual(ref, dual, tol);
  if (!dc.verdict) throw PreconditionFailed("dual", "the given pair is not a dual of ref");
  const BlockSpace block = f.block_space();
  PerturbedApproxReport rep;
  rep.R = operator_norm(Matrix(analysis_matrix(f) - analysis_matrix(ref)), f.X, block, cfg);
  rep.Q = operator_norm(Matrix(synthesis_matrix(ref) - synthesis_matrix(f)), block, f.X, cfg);
  rep.c = operator_norm(analysis_matrix(dual), f.X, block, cfg);
  rep.d = operator_norm(synthesis_matrix(dual), block, f.X, cfg);
  const double dR = rep.d.upper * rep.R.upper;
  const double cQ = rep.c.upper * rep.Q.upper;
  rep.hypothesis = dR < 1.0 && cQ < 1.0;
  rep.certificate = is_approx_dual(f, dual, cfg);
  if (rep.hypothesis) {
    // the gaps are certified by dR and cQ even when the generic norm
    // estimate is looser; kRound absorbs roundoff in the computed gaps
    constexpr double kRound = 1e-12;
    NormEstimate &gl = rep.certificate.gap_left, &gr = rep.certificate.gap_right;
    gl.upper = std::max(gl.lower, std::min(gl.upper, dR + kRound));
    gr.upper = std::max(gr.lower, std::min(gr.upper, cQ + kRound));
    rep.certificate.verdict =
        rep.certificate.gap_left.upper < 1.0 && rep.certificate.gap_right.upper < 1.0;
    rep.verdict = rep.certificate.verdict &&
                  rep.certificate.gap_left.lower <= dR * (1.0 + 1e-9) + kRound &&
                  rep.certificate.gap_right.lower <= cQ * (1.0 + 1e-9) + kRound;
  }
  return rep;
}

}  // namespace ovp
