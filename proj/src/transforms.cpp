#include "ovpframe/transforms.hpp"

#include <algorithm>
#include <sstream>

namespace ovp {

FramePair similar_transform(const FramePair &f, const Eigen::Ref<const Matrix> &R,
                            const Eigen::Ref<const Matrix> &L, const Config &cfg) {
  const Index d = f.d();
  if (R.rows() != d || R.cols() != d || L.rows() != d || L.cols() != d)
    throw DimensionMismatch("R and L must be d x d");
  invert_checked(R, cfg);
  invert_checked(L, cfg);
  FramePair g = f;
  for (Index n = 0; n < f.N(); ++n) {
    g.A[n] = f.A[n] * R;
    g.Psi[n] = L * f.Psi[n];
  }
  return g;
}

SimilarityWitness recover_similarity(const FramePair &f, const FramePair &g, double tol,
                                     const Config &cfg) {
  require_same_shape(f, g);
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  SimilarityWitness w;
  w.R = Sinv * cross_frame_operator(g, f);  // S^{-1} theta_Psi theta_B
  w.L = cross_frame_operator(f, g) * Sinv;  // theta_Phi theta_A S^{-1}
  double res = 0.0;
  for (Index n = 0; n < f.N(); ++n) {
    res = std::max(res, max_abs(f.A[n] * w.R - g.A[n]));
    res = std::max(res, max_abs(w.L * f.Psi[n] - g.Psi[n]));
  }
  w.residual = res;
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "frames are not similar (rebuild residual " << res << ")";
    throw NotSimilar(os.str(), res);
  }
  if (!(smallest_pivot(w.R) > cfg.singular_tol) || !(smallest_pivot(w.L) > cfg.singular_tol))
    throw NotSimilar("recovered transforms are not invertible", res);
  return w;
}

bool is_similar(const FramePair &f, const FramePair &g, double tol, const Config &cfg) {
  require_same_shape(f, g);
  return max_abs(projection_P(f, cfg).entries - projection_P(g, cfg).entries) <= tol;
}

Dilation dilate(const FramePair &f, const Config &cfg) {
  const Index d = f.d(), e = f.e(), N = f.N();
  const Matrix P = projection_P(f, cfg).entries;
  const Matrix IP = Matrix::Identity(P.rows(), P.cols()) - P;
  // P has rank d, so range(I - P) has dimension N e - d; a rank threshold
  // would misread rounding noise when that dimension is 0
  const Index w = N * e - d;
  Eigen::JacobiSVD<Matrix> svd(IP, Eigen::ComputeFullU);
  Dilation out{f, Matrix(), svd.matrixU().leftCols(w)};
  const Matrix &Q = out.W_basis;
  const Matrix IPQ = IP * Q;            // (I - P) Q
  const Matrix QtIP = Q.transpose() * IP;  // Q^T (I - P)

  std::vector<Matrix> B, Phi;
  for (Index n = 0; n < N; ++n) {
    Matrix b(e, d + w);
    b.leftCols(d) = f.A[n];
    b.rightCols(w) = IPQ.middleRows(n * e, e);
    Matrix ph(d + w, e);
    ph.topRows(d) = f.Psi[n];
    ph.bottomRows(w) = QtIP.middleCols(n * e, e);
    B.push_back(std::move(b));
    Phi.push_back(std::move(ph));
  }
  const SpaceDesc X1 = SpaceDesc::make(d + w, f.X.norm_exp, f.X.field);
  out.dilated = FramePair::make(std::move(B), std::move(Phi), f.p, X1, f.Y);
  out.embed = Matrix::Zero(d + w, d);
  out.embed.topRows(d).setIdentity();
  return out;
}

}  // namespace ovp
