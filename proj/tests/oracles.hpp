// Independent reference computations for the unit tests. Nothing here
// calls into the library's numerics.
#ifndef OVPFRAME_TESTS_ORACLES_HPP_
#define OVPFRAME_TESTS_ORACLES_HPP_

#include <cmath>
#include <vector>

#include "ovpframe/frames.hpp"
#include "ovpframe/random.hpp"

namespace oracle {

using ovp::Index;
using ovp::Matrix;
using ovp::Vector;

inline Matrix matmul(const Matrix &A, const Matrix &B) {
  Matrix C = Matrix::Zero(A.rows(), B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j) {
      long double s = 0.0L;
      for (Index k = 0; k < A.cols(); ++k) s += static_cast<long double>(A(i, k)) * B(k, j);
      C(i, j) = static_cast<double>(s);
    }
  return C;
}

inline Matrix kron(const Matrix &A, const Matrix &B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      for (Index k = 0; k < B.rows(); ++k)
        for (Index l = 0; l < B.cols(); ++l) K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
  return K;
}

inline double lr_norm(const Vector &v, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v(i)));
    return m;
  }
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), r);
  return std::pow(s, 1.0 / r);
}

// (sum_n ||z_n||_r^p)^{1/p} over consecutive blocks of size e.
inline double mixed_norm(const Vector &z, double p, double r, Index e) {
  Vector outer(z.size() / e);
  for (Index n = 0; n < outer.size(); ++n) outer(n) = lr_norm(z.segment(n * e, e), r);
  return lr_norm(outer, p);
}

// Exact ||T|| from l^inf(dim) to the given codomain norm: a convex function
// on the cube peaks at a vertex.
template <class CodNorm>
double sup_over_sign_vectors(const Matrix &T, CodNorm cod) {
  const Index n = T.cols();
  double best = 0.0;
  Vector x(n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (Index j = 0; j < n; ++j) x(j) = (mask >> j) & 1 ? 1.0 : -1.0;
    best = std::max(best, cod(Vector(T * x)));
  }
  return best;
}

// Exact ||T|| from l^1(dim): the unit ball's vertices are +-e_j.
template <class CodNorm>
double sup_over_unit_vectors(const Matrix &T, CodNorm cod) {
  double best = 0.0;
  for (Index j = 0; j < T.cols(); ++j) best = std::max(best, cod(Vector(T.col(j))));
  return best;
}

// max ||Tx|| / ||x|| over random x: a lower bound for ||T||.
template <class DomNorm, class CodNorm>
double sampled_gain(const Matrix &T, DomNorm dom, CodNorm cod, ovp::CounterRng &rng, int samples) {
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = rng.vector(T.cols());
    const double nx = dom(x);
    if (nx > 0) best = std::max(best, cod(Vector(T * x)) / nx);
  }
  return best;
}

// A frame pair with independent random entries (no conditioning step).
inline ovp::FramePair random_pair(ovp::CounterRng &rng, Index d, Index e, Index N, double p = 2.0,
                                  double rx = 2.0, double ry = 2.0) {
  std::vector<Matrix> A, Psi;
  for (Index n = 0; n < N; ++n) {
    A.push_back(rng.matrix(e, d));
    Psi.push_back(rng.matrix(d, e));
  }
  return ovp::FramePair::make(A, Psi, p, ovp::SpaceDesc::make(d, rx), ovp::SpaceDesc::make(e, ry));
}

}  // namespace oracle

#endif  // OVPFRAME_TESTS_ORACLES_HPP_
