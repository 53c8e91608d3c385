#ifndef OVPFRAME_PSPACE_HPP_
#define OVPFRAME_PSPACE_HPP_

// Finite-dimensional p-normed coordinate spaces, the block space
// l^p(N) (x) Y modelled as the p-direct sum of N copies of Y, the
// embedding/coordinate maps L_n and Gamma_n, and certified estimation
// of induced operator norms between such spaces.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ovp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

////////////////////////////////////////////////////////////////////////////////
//
// errors
//
////////////////////////////////////////////////////////////////////////////////

class OvpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public OvpError {
 public:
  using OvpError::OvpError;
};

class IndexOutOfRange : public OvpError {
 public:
  using OvpError::OvpError;
};

class InvalidExponent : public OvpError {
 public:
  using OvpError::OvpError;
};

// Raised when a matrix that must be inverted is singular or too badly
// conditioned for the residual check to pass.
class SingularOperator : public OvpError {
 public:
  SingularOperator(const std::string &what, double smallest_pivot)
      : OvpError(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

class NotAProjection : public OvpError {
 public:
  using OvpError::OvpError;
};

class FactorizationMismatch : public OvpError {
 public:
  using OvpError::OvpError;
};

class NotOrthogonal : public OvpError {
 public:
  using OvpError::OvpError;
};

class NotApproxDual : public OvpError {
 public:
  using OvpError::OvpError;
};

// A named precondition of a construction does not hold.
class PreconditionFailed : public OvpError {
 public:
  PreconditionFailed(const std::string &name, const std::string &what)
      : OvpError(name + ": " + what), name_(name) {}
  const std::string &name() const { return name_; }

 private:
  std::string name_;
};

// The hypothesis of a perturbation result could not be certified. This
// is not a falsification; nothing is concluded.
class HypothesisNotCertified : public OvpError {
 public:
  using OvpError::OvpError;
};

class NotSimilar : public OvpError {
 public:
  NotSimilar(const std::string &what, double residual)
      : OvpError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

////////////////////////////////////////////////////////////////////////////////
//
// configuration
//
////////////////////////////////////////////////////////////////////////////////

struct Config {
  double singular_tol = 1e-10;   // relative pivot threshold
  double residual_tol = 1e-9;    // identity / residual tests (the global tol)
  int power_restarts = 500;
  int power_steps = 200;
  int power_stall = 12;          // restarts without improvement before stopping
  std::uint64_t power_seed = 0x9e3779b97f4a7c15ULL;

  // Defaults, with OVPFRAME_TOL overriding residual_tol when set.
  static Config from_env();
};

////////////////////////////////////////////////////////////////////////////////
//
// spaces
//
////////////////////////////////////////////////////////////////////////////////

enum class ScalarField { Real, Complex };

// K^dim with the l^r norm, r in [1, inf].
struct SpaceDesc {
  Index dim = 1;
  double norm_exp = 2.0;
  ScalarField field = ScalarField::Real;

  static SpaceDesc make(Index dim, double norm_exp,
                        ScalarField field = ScalarField::Real);
  bool operator==(const SpaceDesc &) const = default;
};

// l^p(N) (x) Y as the p-direct sum of N copies of Y, p in [1, inf).
struct BlockSpace {
  double p = 2.0;
  Index N = 1;
  SpaceDesc factor;

  static BlockSpace make(double p, Index N, const SpaceDesc &factor);
  Index dim() const { return N * factor.dim; }
  bool operator==(const BlockSpace &) const = default;
};

// A coordinate space together with its norm: either a flat l^r space or
// a mixed l^p(l^r) norm over equally sized blocks. Mixed shapes that are
// really flat (one block, scalar blocks, or p == r) are normalised to the
// flat form, so is_flat() is a structural property.
class Space {
 public:
  Space(const SpaceDesc &s);   // NOLINT(implicit)
  Space(const BlockSpace &b);  // NOLINT(implicit)
  static Space mixed(double outer, Index blocks, double inner, Index block_dim);

  Index dim() const { return blocks_ * block_dim_; }
  Index blocks() const { return blocks_; }
  Index block_dim() const { return block_dim_; }
  double outer_exp() const { return outer_; }
  double inner_exp() const { return inner_; }
  bool is_flat() const { return blocks_ == 1; }
  // Exponent of a flat space; only meaningful when is_flat().
  double flat_exp() const { return inner_; }

  double norm(const Eigen::Ref<const Vector> &v) const;
  // The dual space (conjugate exponents, same block structure).
  Space dual() const;
  // A vector w with dual().norm(w) == 1 and <w, v> == norm(v); zero for v == 0.
  Vector norming_vector(const Eigen::Ref<const Vector> &v) const;

  // sup ||x||_{l^q} / ||x||_this over the same coordinates.
  double to_flat_constant(double q) const;
  // sup ||x||_this / ||x||_{l^q}.
  double from_flat_constant(double q) const;

  bool operator==(const Space &) const = default;

 private:
  Space(double outer, Index blocks, double inner, Index block_dim);
  void normalise();

  double outer_;
  Index blocks_;
  double inner_;
  Index block_dim_;
};

// A block vector: the stacked coordinates of (z_1, ..., z_N).
class BlockVector {
 public:
  BlockVector(const BlockSpace &space, Vector coords);
  static BlockVector zero(const BlockSpace &space);

  const BlockSpace &space() const { return space_; }
  const Vector &coords() const { return coords_; }
  Index size() const { return space_.N; }
  Vector block(Index n) const;
  std::vector<Vector> blocks() const;
  double norm() const;

  BlockVector &operator+=(const BlockVector &other);

 private:
  BlockSpace space_;
  Vector coords_;
};

// Dense matrix with declared domain and codomain.
struct Operator {
  Matrix entries;
  Space domain;
  Space codomain;

  Operator(Matrix m, Space dom, Space cod);
  static Operator identity(const Space &s);
};

// Certified interval for an induced operator norm.
struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  // Power iteration used its whole restart budget without the lower bound
  // settling; the interval is still valid but possibly wide.
  bool budget_exhausted = false;

  static NormEstimate exact_value(double v) { return {v, v, true, false}; }
  bool contains(double v, double rel = 0.0) const {
    return v >= lower * (1 - rel) && v <= upper * (1 + rel);
  }
};

////////////////////////////////////////////////////////////////////////////////
//
// operations
//
////////////////////////////////////////////////////////////////////////////////

// (sum |v_i|^r)^(1/r), max |v_i| for r = inf; 0 for the empty vector.
double p_norm(const Eigen::Ref<const Vector> &v, double r);

// Conjugate exponent r* with 1/r + 1/r* = 1.
double conjugate_exp(double r);

// L_n y = e_n (x) y. Indices are zero-based.
BlockVector embed_L(Index n, const Eigen::Ref<const Vector> &y,
                    const BlockSpace &space);
// Gamma_n z = z_n.
Vector project_Gamma(Index n, const BlockVector &z);

// Matrices of L_n (dim x e) and Gamma_n (e x dim).
Matrix L_matrix(Index n, const BlockSpace &space);
Matrix Gamma_matrix(Index n, const BlockSpace &space);

NormEstimate operator_norm(const Eigen::Ref<const Matrix> &T, const Space &domain,
                           const Space &codomain, const Config &cfg = {});
NormEstimate operator_norm(const Operator &T, const Config &cfg = {});
// Flat l^r -> l^s convenience form.
NormEstimate operator_norm(const Eigen::Ref<const Matrix> &T, double r, double s,
                           const Config &cfg = {});

struct Inverse {
  Matrix matrix;
  double smallest_pivot = 0.0;  // relative to the largest pivot
  double residual = 0.0;        // max of both one-sided residuals
};

// Partial-pivoting LU inverse with both residuals checked against
// cfg.residual_tol. Throws SingularOperator.
Inverse invert_checked(const Eigen::Ref<const Matrix> &T, const Config &cfg = {});
Matrix invert(const Eigen::Ref<const Matrix> &T, const Config &cfg = {});
Operator invert(const Operator &T, const Config &cfg = {});

// Smallest relative pivot of a partial-pivoting LU (0 for singular).
double smallest_pivot(const Eigen::Ref<const Matrix> &T);

double max_abs(const Eigen::Ref<const Matrix> &M);

}  // namespace ovp

#endif  // OVPFRAME_PSPACE_HPP_
