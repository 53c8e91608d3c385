#include "ovpframe/pspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ovpframe/random.hpp"

namespace ovp {

namespace {

double reciprocal(double r) { return std::isinf(r) ? 0.0 : 1.0 / r; }

void check_exp(double r, const char *what) {
  if (!(r >= 1.0)) {  // also rejects NaN
    std::ostringstream os;
    os << what << " must lie in [1, inf], got " << r;
    throw InvalidExponent(os.str());
  }
}

// Norming vector of v in l^q: ||w||_{q*} = 1 and <w, v> = ||v||_q.
Vector flat_norming(const Eigen::Ref<const Vector> &v, double q) {
  Vector w = Vector::Zero(v.size());
  const double nv = p_norm(v, q);
  if (nv == 0.0) return w;
  if (q == 1.0) {
    for (Index i = 0; i < v.size(); ++i)
      w(i) = v(i) > 0 ? 1.0 : (v(i) < 0 ? -1.0 : 0.0);
  } else if (std::isinf(q)) {
    Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    w(k) = v(k) > 0 ? 1.0 : -1.0;
  } else {
    for (Index i = 0; i < v.size(); ++i) {
      const double u = std::abs(v(i)) / nv;
      const double mag = std::pow(u, q - 1.0);
      w(i) = v(i) >= 0 ? mag : -mag;
    }
  }
  return w;
}

// ||T||_{l^1 -> C}: the extreme points of the l^1 ball are +-e_j.
double column_formula(const Eigen::Ref<const Matrix> &T, const Space &C) {
  double best = 0.0;
  for (Index j = 0; j < T.cols(); ++j) best = std::max(best, C.norm(T.col(j)));
  return best;
}

// ||T||_{D -> l^inf}: max over rows of the dual norm of the row.
double row_formula(const Eigen::Ref<const Matrix> &T, const Space &D) {
  const Space Dd = D.dual();
  double best = 0.0;
  for (Index i = 0; i < T.rows(); ++i)
    best = std::max(best, Dd.norm(T.row(i).transpose()));
  return best;
}

double spectral_norm(const Eigen::Ref<const Matrix> &T) {
  if (T.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(T);
  return svd.singularValues()(0);
}

bool is_flat_exp(const Space &S, double q) {
  return S.is_flat() && (S.flat_exp() == q || (std::isinf(q) && std::isinf(S.flat_exp())));
}

// Upper bounds that hold for real and complex scalars alike. All of them
// are products of exactly computable quantities.
double upper_bound(const Eigen::Ref<const Matrix> &T, const Space &D, const Space &C) {
  const Space Dd = D.dual();
  double best = kInf;

  // rowwise Hoelder: |(Tx)_i| <= ||row_i||_{D*} ||x||_D, and C is monotone
  {
    Vector rho(T.rows());
    for (Index i = 0; i < T.rows(); ++i) rho(i) = Dd.norm(T.row(i).transpose());
    best = std::min(best, C.norm(rho));
  }
  // columnwise triangle inequality
  {
    Vector kappa(T.cols());
    for (Index j = 0; j < T.cols(); ++j) kappa(j) = C.norm(T.col(j));
    best = std::min(best, Dd.norm(kappa));
  }
  // factor through l^2, l^1 and l^inf
  const double sigma = spectral_norm(T);
  best = std::min(best, C.from_flat_constant(2.0) * sigma * D.to_flat_constant(2.0));
  best = std::min(best, column_formula(T, C) * D.to_flat_constant(1.0));
  best = std::min(best, C.from_flat_constant(kInf) * row_formula(T, D));

  // Riesz-Thorin between the exactly computable exponent pairs: the line
  // r = 1, the line s = inf and the point r = s = 2. For real matrices the
  // endpoint norms coincide with the complex ones, so the complex bound
  // also covers the real norm.
  if (D.is_flat() && C.is_flat()) {
    const double a = reciprocal(D.flat_exp());
    const double b = reciprocal(C.flat_exp());
    if (a >= b) {
      const int grid = 32;
      const double lo = 1.0 - a, hi = 1.0 - b;
      for (int k = 0; k <= grid; ++k) {
        const double theta = lo + (hi - lo) * k / grid;
        if (theta <= 0.0 || theta >= 1.0) continue;
        const double a1 = std::clamp((a - (1.0 - theta)) / theta, 0.0, 1.0);
        const double b0 = std::clamp(b / (1.0 - theta), 0.0, 1.0);
        const Space col_space = SpaceDesc::make(C.dim(), b0 == 0.0 ? kInf : 1.0 / b0);
        const Space row_space = SpaceDesc::make(D.dim(), a1 == 0.0 ? kInf : 1.0 / a1);
        const double f0 = column_formula(T, col_space);
        const double f1 = row_formula(T, row_space);
        best = std::min(best, std::pow(f0, 1.0 - theta) * std::pow(f1, theta));
      }
      // ray from (1/2, 1/2) through (a, b) to the computable boundary
      const double da = a - 0.5, db = b - 0.5;
      double lambda = kInf;
      if (da > 0) lambda = std::min(lambda, 0.5 / da);
      if (db < 0) lambda = std::min(lambda, 0.5 / -db);
      if (std::isfinite(lambda) && lambda >= 1.0) {
        const double qa = std::clamp(0.5 + lambda * da, 0.0, 1.0);
        const double qb = std::clamp(0.5 + lambda * db, 0.0, 1.0);
        double fq;
        if (qa >= 1.0 - 1e-15) {
          fq = column_formula(T, SpaceDesc::make(C.dim(), qb == 0.0 ? kInf : 1.0 / qb));
        } else {
          fq = row_formula(T, SpaceDesc::make(D.dim(), qa == 0.0 ? kInf : 1.0 / qa));
        }
        const double theta = 1.0 / lambda;
        best = std::min(best, std::pow(sigma, 1.0 - theta) * std::pow(fq, theta));
      }
    }
  }
  return best;
}

// Lower bound: best gain ||Tx||_C / ||x||_D seen by the nonlinear power
// method x <- norming_{D*}(T^T norming_C(Tx)).
struct PowerResult {
  double gain = 0.0;
  bool exhausted = false;
};

PowerResult power_lower(const Eigen::Ref<const Matrix> &T, const Space &D, const Space &C,
                        double upper, const Config &cfg) {
  const Space Dd = D.dual();
  PowerResult res;
  auto gain_of = [&](const Vector &x) {
    const double nx = D.norm(x);
    return nx > 0 ? C.norm(T * x) / nx : 0.0;
  };

  Index best_col = 0;
  for (Index j = 0; j < T.cols(); ++j) {
    const double g = gain_of(Vector::Unit(T.cols(), j));
    if (g > res.gain) {
      res.gain = g;
      best_col = j;
    }
  }

  CounterRng rng(cfg.power_seed, static_cast<std::uint64_t>(T.rows() * 7919 + T.cols()));
  int since_improvement = 0;
  bool settled = false;
  for (int restart = 0; restart < cfg.power_restarts; ++restart) {
    Vector x;
    if (restart == 0) {
      x = Vector::Unit(T.cols(), best_col);
    } else if (restart == 1) {
      Eigen::JacobiSVD<Matrix> svd(T, Eigen::ComputeThinV);
      x = svd.matrixV().col(0);
    } else if (restart == 2) {
      x = Vector::Ones(T.cols());
    } else {
      x = rng.vector(T.cols());
    }
    const double before = res.gain;
    double prev = -1.0;
    for (int step = 0; step < cfg.power_steps; ++step) {
      const double nx = D.norm(x);
      if (nx == 0.0) break;
      x /= nx;
      const Vector y = T * x;
      const double g = C.norm(y);
      res.gain = std::max(res.gain, g);
      if (std::abs(g - prev) <= 1e-14 * g) break;
      prev = g;
      const Vector z = T.transpose() * C.norming_vector(y);
      if (z.isZero(0.0)) break;
      x = Dd.norming_vector(z);
    }
    if (res.gain >= upper * (1.0 - 1e-13)) {
      settled = true;
      break;
    }
    since_improvement = res.gain > before * (1.0 + 1e-12) ? 0 : since_improvement + 1;
    if (since_improvement >= cfg.power_stall) {
      settled = true;
      break;
    }
  }
  res.exhausted = !settled;
  return res;
}

NormEstimate combine_blocks(const std::vector<NormEstimate> &parts) {
  NormEstimate out = NormEstimate::exact_value(0.0);
  for (const auto &e : parts) {
    out.lower = std::max(out.lower, e.lower);
    out.upper = std::max(out.upper, e.upper);
    out.exact = out.exact && e.exact;
    out.budget_exhausted = out.budget_exhausted || e.budget_exhausted;
  }
  if (out.exact) out.upper = out.lower;
  return out;
}

}  // namespace

////////////////////////////////////////////////////////////////////////////////

Config Config::from_env() {
  Config cfg;
  if (const char *env = std::getenv("OVPFRAME_TOL")) {
    char *end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0 && std::isfinite(v)) cfg.residual_tol = v;
  }
  return cfg;
}

SpaceDesc SpaceDesc::make(Index dim, double norm_exp, ScalarField field) {
  if (dim < 1) throw DimensionMismatch("space dimension must be >= 1");
  check_exp(norm_exp, "norm exponent");
  return SpaceDesc{dim, norm_exp, field};
}

BlockSpace BlockSpace::make(double p, Index N, const SpaceDesc &factor) {
  if (!(p >= 1.0) || std::isinf(p))
    throw InvalidExponent("sequence exponent p must lie in [1, inf)");
  if (N < 1) throw DimensionMismatch("block count N must be >= 1");
  SpaceDesc::make(factor.dim, factor.norm_exp, factor.field);
  return BlockSpace{p, N, factor};
}

Space::Space(double outer, Index blocks, double inner, Index block_dim)
    : outer_(outer), blocks_(blocks), inner_(inner), block_dim_(block_dim) {
  check_exp(outer_, "outer exponent");
  check_exp(inner_, "inner exponent");
  if (blocks_ < 1 || block_dim_ < 1) throw DimensionMismatch("empty space");
  normalise();
}

Space::Space(const SpaceDesc &s) : Space(s.norm_exp, 1, s.norm_exp, s.dim) {}

Space::Space(const BlockSpace &b) : Space(b.p, b.N, b.factor.norm_exp, b.factor.dim) {}

Space Space::mixed(double outer, Index blocks, double inner, Index block_dim) {
  return Space(outer, blocks, inner, block_dim);
}

void Space::normalise() {
  if (blocks_ == 1) {
    outer_ = inner_;
  } else if (block_dim_ == 1) {
    block_dim_ = blocks_;
    blocks_ = 1;
    inner_ = outer_;
  } else if (outer_ == inner_) {
    block_dim_ *= blocks_;
    blocks_ = 1;
  }
}

double Space::norm(const Eigen::Ref<const Vector> &v) const {
  if (v.size() != dim()) throw DimensionMismatch("vector does not match space dimension");
  if (is_flat()) return p_norm(v, inner_);
  Vector a(blocks_);
  for (Index n = 0; n < blocks_; ++n) a(n) = p_norm(v.segment(n * block_dim_, block_dim_), inner_);
  return p_norm(a, outer_);
}

Space Space::dual() const {
  return Space(conjugate_exp(outer_), blocks_, conjugate_exp(inner_), block_dim_);
}

Vector Space::norming_vector(const Eigen::Ref<const Vector> &v) const {
  if (is_flat()) return flat_norming(v, inner_);
  Vector a(blocks_);
  for (Index n = 0; n < blocks_; ++n) a(n) = p_norm(v.segment(n * block_dim_, block_dim_), inner_);
  const Vector c = flat_norming(a, outer_);
  Vector w = Vector::Zero(v.size());
  for (Index n = 0; n < blocks_; ++n) {
    if (c(n) == 0.0) continue;
    w.segment(n * block_dim_, block_dim_) =
        c(n) * flat_norming(v.segment(n * block_dim_, block_dim_), inner_);
  }
  return w;
}

double Space::to_flat_constant(double q) const {
  const double fo = std::max(0.0, reciprocal(q) - reciprocal(outer_));
  const double fi = std::max(0.0, reciprocal(q) - reciprocal(inner_));
  return std::pow(static_cast<double>(blocks_), fo) * std::pow(static_cast<double>(block_dim_), fi);
}

double Space::from_flat_constant(double q) const {
  const double fo = std::max(0.0, reciprocal(outer_) - reciprocal(q));
  const double fi = std::max(0.0, reciprocal(inner_) - reciprocal(q));
  return std::pow(static_cast<double>(blocks_), fo) * std::pow(static_cast<double>(block_dim_), fi);
}

////////////////////////////////////////////////////////////////////////////////

BlockVector::BlockVector(const BlockSpace &space, Vector coords)
    : space_(space), coords_(std::move(coords)) {
  if (coords_.size() != space_.dim())
    throw DimensionMismatch("block vector length does not match N * dim(Y)");
}

BlockVector BlockVector::zero(const BlockSpace &space) {
  return BlockVector(space, Vector::Zero(space.dim()));
}

Vector BlockVector::block(Index n) const {
  if (n < 0 || n >= space_.N) throw IndexOutOfRange("block index out of range");
  return coords_.segment(n * space_.factor.dim, space_.factor.dim);
}

std::vector<Vector> BlockVector::blocks() const {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(space_.N));
  for (Index n = 0; n < space_.N; ++n) out.push_back(block(n));
  return out;
}

double BlockVector::norm() const { return Space(space_).norm(coords_); }

BlockVector &BlockVector::operator+=(const BlockVector &other) {
  if (!(other.space_ == space_)) throw DimensionMismatch("block spaces differ");
  coords_ += other.coords_;
  return *this;
}

Operator::Operator(Matrix m, Space dom, Space cod)
    : entries(std::move(m)), domain(dom), codomain(cod) {
  if (entries.rows() != codomain.dim() || entries.cols() != domain.dim())
    throw DimensionMismatch("operator shape does not match domain/codomain");
}

Operator Operator::identity(const Space &s) {
  return Operator(Matrix::Identity(s.dim(), s.dim()), s, s);
}

////////////////////////////////////////////////////////////////////////////////

double p_norm(const Eigen::Ref<const Vector> &v, double r) {
  check_exp(r, "norm exponent");
  if (v.size() == 0) return 0.0;
  const double m = v.cwiseAbs().maxCoeff();
  if (std::isinf(r) || m == 0.0) return m;
  if (r == 1.0) return v.cwiseAbs().sum();
  if (r == 2.0) return m * (v / m).norm();
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)) / m, r);
  return m * std::pow(s, 1.0 / r);
}

double conjugate_exp(double r) {
  if (r == 1.0) return kInf;
  if (std::isinf(r)) return 1.0;
  return r / (r - 1.0);
}

BlockVector embed_L(Index n, const Eigen::Ref<const Vector> &y, const BlockSpace &space) {
  if (n < 0 || n >= space.N) throw IndexOutOfRange("embed_L: block index out of range");
  if (y.size() != space.factor.dim) throw DimensionMismatch("embed_L: vector not in Y");
  Vector z = Vector::Zero(space.dim());
  z.segment(n * space.factor.dim, space.factor.dim) = y;
  return BlockVector(space, std::move(z));
}

Vector project_Gamma(Index n, const BlockVector &z) {
  if (n < 0 || n >= z.space().N) throw IndexOutOfRange("project_Gamma: block index out of range");
  return z.block(n);
}

Matrix L_matrix(Index n, const BlockSpace &space) {
  if (n < 0 || n >= space.N) throw IndexOutOfRange("L_n: block index out of range");
  const Index e = space.factor.dim;
  Matrix M = Matrix::Zero(space.dim(), e);
  M.block(n * e, 0, e, e).setIdentity();
  return M;
}

Matrix Gamma_matrix(Index n, const BlockSpace &space) {
  return L_matrix(n, space).transpose();
}

double max_abs(const Eigen::Ref<const Matrix> &M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

NormEstimate operator_norm(const Eigen::Ref<const Matrix> &T, const Space &D, const Space &C,
                           const Config &cfg) {
  if (T.rows() != C.dim() || T.cols() != D.dim())
    throw DimensionMismatch("operator_norm: matrix shape does not match spaces");
  if (T.size() == 0 || T.isZero(0.0)) return NormEstimate::exact_value(0.0);

  if (is_flat_exp(D, 1.0)) return NormEstimate::exact_value(column_formula(T, C));
  if (is_flat_exp(C, kInf)) return NormEstimate::exact_value(row_formula(T, D));
  if (is_flat_exp(D, 2.0) && is_flat_exp(C, 2.0))
    return NormEstimate::exact_value(spectral_norm(T));

  // l^1-sum domain: the norm is the largest block norm
  if (!D.is_flat() && D.outer_exp() == 1.0) {
    const Space sub = SpaceDesc::make(D.block_dim(), D.inner_exp());
    std::vector<NormEstimate> parts;
    for (Index n = 0; n < D.blocks(); ++n)
      parts.push_back(operator_norm(T.middleCols(n * D.block_dim(), D.block_dim()), sub, C, cfg));
    return combine_blocks(parts);
  }
  // l^inf-sum codomain
  if (!C.is_flat() && std::isinf(C.outer_exp())) {
    const Space sub = SpaceDesc::make(C.block_dim(), C.inner_exp());
    std::vector<NormEstimate> parts;
    for (Index n = 0; n < C.blocks(); ++n)
      parts.push_back(operator_norm(T.middleRows(n * C.block_dim(), C.block_dim()), D, sub, cfg));
    return combine_blocks(parts);
  }

  NormEstimate est;
  est.upper = upper_bound(T, D, C) * (1.0 + 1e-13);
  const PowerResult pw = power_lower(T, D, C, est.upper, cfg);
  est.lower = std::min(pw.gain * (1.0 - 1e-14), est.upper);
  est.exact = false;
  est.budget_exhausted = pw.exhausted;
  return est;
}

NormEstimate operator_norm(const Operator &T, const Config &cfg) {
  return operator_norm(T.entries, T.domain, T.codomain, cfg);
}

NormEstimate operator_norm(const Eigen::Ref<const Matrix> &T, double r, double s,
                           const Config &cfg) {
  return operator_norm(T, SpaceDesc::make(T.cols(), r), SpaceDesc::make(T.rows(), s), cfg);
}

double smallest_pivot(const Eigen::Ref<const Matrix> &T) {
  if (T.rows() != T.cols()) throw DimensionMismatch("smallest_pivot: matrix not square");
  if (T.size() == 0) return 1.0;
  Eigen::PartialPivLU<Matrix> lu(T);
  const Vector piv = lu.matrixLU().diagonal().cwiseAbs();
  const double big = piv.maxCoeff();
  if (!(big > 0.0) || !std::isfinite(big)) return 0.0;
  return piv.minCoeff() / big;
}

Inverse invert_checked(const Eigen::Ref<const Matrix> &T, const Config &cfg) {
  if (T.rows() != T.cols()) throw DimensionMismatch("invert: matrix not square");
  const Index n = T.rows();
  Inverse out;
  if (n == 0) return out;
  Eigen::PartialPivLU<Matrix> lu(T);
  const Vector piv = lu.matrixLU().diagonal().cwiseAbs();
  const double big = piv.maxCoeff();
  out.smallest_pivot = (big > 0.0 && std::isfinite(big)) ? piv.minCoeff() / big : 0.0;
  if (!(out.smallest_pivot > cfg.singular_tol)) {
    std::ostringstream os;
    os << "singular operator (smallest relative pivot " << out.smallest_pivot << ")";
    throw SingularOperator(os.str(), out.smallest_pivot);
  }
  out.matrix = lu.inverse();
  const Matrix I = Matrix::Identity(n, n);
  out.residual = std::max(max_abs(T * out.matrix - I), max_abs(out.matrix * T - I));
  if (!(out.residual <= cfg.residual_tol)) {
    std::ostringstream os;
    os << "ill-conditioned operator (inverse residual " << out.residual << ", smallest pivot "
       << out.smallest_pivot << ")";
    throw SingularOperator(os.str(), out.smallest_pivot);
  }
  return out;
}

Matrix invert(const Eigen::Ref<const Matrix> &T, const Config &cfg) {
  return invert_checked(T, cfg).matrix;
}

Operator invert(const Operator &T, const Config &cfg) {
  return Operator(invert(T.entries, cfg), T.codomain, T.domain);
}

}  // namespace ovp
