#include "ovpframe/frames.hpp"

#include <cmath>
#include <sstream>

namespace ovp {

FramePair FramePair::make(std::vector<Matrix> A, std::vector<Matrix> Psi, double p,
                          const SpaceDesc &X, const SpaceDesc &Y) {
  SpaceDesc::make(X.dim, X.norm_exp, X.field);
  SpaceDesc::make(Y.dim, Y.norm_exp, Y.field);
  if (!(p >= 1.0) || std::isinf(p))
    throw InvalidExponent("sequence exponent p must lie in [1, inf)");
  if (A.empty()) throw DimensionMismatch("frame needs N >= 1 elements");
  if (A.size() != Psi.size()) throw DimensionMismatch("A and Psi have different lengths");
  for (std::size_t n = 0; n < A.size(); ++n) {
    if (A[n].rows() != Y.dim || A[n].cols() != X.dim) {
      std::ostringstream os;
      os << "A[" << n << "] is " << A[n].rows() << "x" << A[n].cols() << ", expected "
         << Y.dim << "x" << X.dim;
      throw DimensionMismatch(os.str());
    }
    if (Psi[n].rows() != X.dim || Psi[n].cols() != Y.dim) {
      std::ostringstream os;
      os << "Psi[" << n << "] is " << Psi[n].rows() << "x" << Psi[n].cols() << ", expected "
         << X.dim << "x" << Y.dim;
      throw DimensionMismatch(os.str());
    }
  }
  return FramePair{std::move(A), std::move(Psi), p, X, Y};
}

bool same_shape(const FramePair &f, const FramePair &g) {
  return f.X == g.X && f.Y == g.Y && f.N() == g.N() && f.p == g.p;
}

void require_same_shape(const FramePair &f, const FramePair &g) {
  if (!same_shape(f, g)) throw DimensionMismatch("frames differ in X, Y, N or p");
}

BlockVector analysis(const FramePair &f, const Eigen::Ref<const Vector> &x) {
  if (x.size() != f.d()) throw DimensionMismatch("analysis: x not in X");
  return BlockVector(f.block_space(), analysis_matrix(f) * x);
}

Vector synthesis(const FramePair &f, const BlockVector &z) {
  if (!(z.space() == f.block_space())) throw DimensionMismatch("synthesis: z not in block space");
  return synthesis_matrix(f) * z.coords();
}

Matrix analysis_matrix(const FramePair &f) {
  const Index e = f.e();
  Matrix T(f.N() * e, f.d());
  for (Index n = 0; n < f.N(); ++n) T.middleRows(n * e, e) = f.A[n];
  return T;
}

Matrix synthesis_matrix(const FramePair &f) {
  const Index e = f.e();
  Matrix T(f.d(), f.N() * e);
  for (Index n = 0; n < f.N(); ++n) T.middleCols(n * e, e) = f.Psi[n];
  return T;
}

Operator frame_operator(const FramePair &f) { return Operator(cross_frame_operator(f, f), f.X, f.X); }

Matrix cross_frame_operator(const FramePair &analysis_side, const FramePair &synthesis_side) {
  require_same_shape(analysis_side, synthesis_side);
  // long double accumulation: S can be small next to its summands
  using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Wide S = Wide::Zero(analysis_side.d(), analysis_side.d());
  for (Index n = 0; n < analysis_side.N(); ++n)
    S.noalias() += synthesis_side.Psi[n].cast<long double>() * analysis_side.A[n].cast<long double>();
  return S.cast<double>();
}

FrameBounds frame_bounds(const FramePair &f, const Config &cfg) {
  FrameBounds fb;
  const Operator S = frame_operator(f);
  fb.b = operator_norm(S, cfg);
  try {
    const Matrix Sinv = invert(S.entries, cfg);
    const NormEstimate ni = operator_norm(Sinv, f.X, f.X, cfg);
    fb.a.lower = ni.upper > 0 ? 1.0 / ni.upper : 0.0;
    fb.a.upper = ni.lower > 0 ? 1.0 / ni.lower : kInf;
    fb.a.exact = ni.exact;
    fb.a.budget_exhausted = ni.budget_exhausted;
  } catch (const SingularOperator &) {
    fb.a = NormEstimate::exact_value(0.0);
  }
  const BlockSpace block = f.block_space();
  fb.c = operator_norm(analysis_matrix(f), f.X, block, cfg);
  fb.d = operator_norm(synthesis_matrix(f), block, f.X, cfg);
  return fb;
}

const char *to_string(FrameKind k) {
  switch (k) {
    case FrameKind::NotBessel: return "NotBessel";
    case FrameKind::Bessel: return "Bessel";
    case FrameKind::Frame: return "Frame";
    case FrameKind::ParsevalFrame: return "ParsevalFrame";
    case FrameKind::RieszBasis: return "RieszBasis";
  }
  return "?";
}

FrameClass classify(const FramePair &f, double tol, const Config &cfg) {
  FrameClass fc;
  const Matrix S = frame_operator(f).entries;
  const Index d = f.d();
  fc.parseval_residual = max_abs(S - Matrix::Identity(d, d));
  fc.smallest_pivot = smallest_pivot(S);
  fc.frame = fc.smallest_pivot > cfg.singular_tol;
  if (fc.frame) {
    fc.parseval = fc.parseval_residual <= tol;
    try {
      const Matrix P = analysis_matrix(f) * invert(S, cfg) * synthesis_matrix(f);
      fc.riesz_residual = max_abs(P - Matrix::Identity(P.rows(), P.cols()));
      fc.riesz = fc.riesz_residual <= tol;
    } catch (const SingularOperator &) {
      // pivot passed but the residual check did not: too ill-conditioned
      fc.frame = false;
      fc.parseval = false;
    }
  }
  if (fc.riesz) {
    fc.kind = FrameKind::RieszBasis;
  } else if (fc.parseval) {
    fc.kind = FrameKind::ParsevalFrame;
  } else if (fc.frame) {
    fc.kind = FrameKind::Frame;
  } else {
    fc.kind = FrameKind::Bessel;
  }
  return fc;
}

FrameClass classify(const FramePair &f, const Config &cfg) {
  return classify(f, cfg.residual_tol, cfg);
}

Operator projection_P(const FramePair &f, const Config &cfg) {
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  const BlockSpace block = f.block_space();
  using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Wide P = analysis_matrix(f).cast<long double>() * Sinv.cast<long double>() *
                 synthesis_matrix(f).cast<long double>();
  return Operator(P.cast<double>(), block, block);
}

FramePair canonical_dual(const FramePair &f, const Config &cfg) {
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  FramePair g = f;
  for (Index n = 0; n < f.N(); ++n) {
    g.A[n] = f.A[n] * Sinv;
    g.Psi[n] = Sinv * f.Psi[n];
  }
  return g;
}

FramePair from_UV(const Eigen::Ref<const Matrix> &U, const Eigen::Ref<const Matrix> &V,
                  const BlockSpace &block, const SpaceDesc &X) {
  const Index e = block.factor.dim;
  if (U.rows() != block.dim() || U.cols() != X.dim)
    throw DimensionMismatch("from_UV: U must be (N e) x d");
  if (V.rows() != X.dim || V.cols() != block.dim())
    throw DimensionMismatch("from_UV: V must be d x (N e)");
  std::vector<Matrix> A, Psi;
  for (Index n = 0; n < block.N; ++n) {
    A.push_back(U.middleRows(n * e, e));
    Psi.push_back(V.middleCols(n * e, e));
  }
  return FramePair::make(std::move(A), std::move(Psi), block.p, X, block.factor);
}

std::pair<Matrix, Matrix> to_UV(const FramePair &f) {
  return {analysis_matrix(f), synthesis_matrix(f)};
}

Matrix range_basis(const Eigen::Ref<const Matrix> &M, double rel_tol) {
  Eigen::ColPivHouseholderQR<Matrix> qr(M);
  qr.setThreshold(rel_tol);
  const Index rank = qr.rank();
  const Matrix Q = qr.householderQ();
  return Q.leftCols(rank);
}

FramePair restrict_to(const FramePair &f, const Eigen::Ref<const Matrix> &P,
                      const Eigen::Ref<const Matrix> &basisZ, double tol) {
  const Index d = f.d();
  if (P.rows() != d || P.cols() != d) throw DimensionMismatch("restrict: P must be d x d");
  if (basisZ.rows() != d || basisZ.cols() < 1)
    throw DimensionMismatch("restrict: basis must have d rows and at least one column");
  const double idem = max_abs(P * P - P);
  if (idem > tol) {
    std::ostringstream os;
    os << "||P^2 - P||_max = " << idem;
    throw NotAProjection(os.str());
  }
  const Matrix &E = basisZ;
  const Index k = E.cols();
  // columns lie in range(P), are independent, and there are rank(P) of them
  if (max_abs(P * E - E) > tol * std::max(1.0, max_abs(E)))
    throw PreconditionFailed("basisZ", "columns are not in range(P)");
  Eigen::ColPivHouseholderQR<Matrix> qe(E);
  qe.setThreshold(1e-9);
  if (qe.rank() != k) throw PreconditionFailed("basisZ", "columns are linearly dependent");
  if (range_basis(P).cols() != k) throw PreconditionFailed("basisZ", "does not span range(P)");

  const Matrix Eplus = (E.transpose() * E).ldlt().solve(E.transpose());
  const SpaceDesc Z = SpaceDesc::make(k, f.X.norm_exp, f.X.field);
  std::vector<Matrix> A, Psi;
  for (Index n = 0; n < f.N(); ++n) {
    A.push_back(f.A[n] * E);
    Psi.push_back(Eplus * P * f.Psi[n]);
  }
  return FramePair::make(std::move(A), std::move(Psi), f.p, Z, f.Y);
}

FramePair complete_to_parseval(const FramePair &f, const Eigen::Ref<const Matrix> &B,
                               const Eigen::Ref<const Matrix> &Phi, double tol) {
  if (B.rows() != f.e() || B.cols() != f.d()) throw DimensionMismatch("B must be e x d");
  if (Phi.rows() != f.d() || Phi.cols() != f.e()) throw DimensionMismatch("Phi must be d x e");
  const Matrix gap = Matrix::Identity(f.d(), f.d()) - frame_operator(f).entries;
  const double mismatch = max_abs(gap - Phi * B);
  if (mismatch > tol) {
    std::ostringstream os;
    os << "||(I - S) - Phi B||_max = " << mismatch;
    throw FactorizationMismatch(os.str());
  }
  FramePair g = f;
  g.A.push_back(B);
  g.Psi.push_back(Phi);
  return g;
}

Reconstruction iterative_reconstruct(const FramePair &f, const Eigen::Ref<const Vector> &x,
                                     int n_iters, const Config &cfg) {
  if (x.size() != f.d()) throw DimensionMismatch("iterative_reconstruct: x not in X");
  const FrameBounds fb = frame_bounds(f, cfg);
  if (!(fb.a.lower > 0.0)) throw SingularOperator("lower frame bound is not positive", 0.0);
  Reconstruction rec;
  rec.a = fb.a.lower;
  rec.b = fb.b.upper;
  rec.ratio = (rec.b - rec.a) / (rec.b + rec.a);
  const double lambda = 2.0 / (rec.a + rec.b);
  const Matrix S = frame_operator(f).entries;
  const Index d = f.d();
  rec.step_norm = operator_norm(Matrix(Matrix::Identity(d, d) - lambda * S), f.X, f.X, cfg);
  rec.guaranteed = rec.step_norm.upper <= rec.ratio * (1.0 + 1e-12) + 1e-15;

  const Space X = f.X;
  const double nx = X.norm(x);
  const Vector Sx = S * x;  // what the coefficients deliver
  Vector xk = Vector::Zero(d);
  double bound = nx;
  for (int k = 1; k <= n_iters; ++k) {
    xk += lambda * (Sx - S * xk);
    rec.iterates.push_back(xk);
    const double err = X.norm(xk - x);
    rec.errors.push_back(err);
    bound *= rec.ratio;
    if (rec.guaranteed && err > bound + 1e-12 * nx) ++rec.bound_violations;
  }
  return rec;
}

}  // namespace ovp
