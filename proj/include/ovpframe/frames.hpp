#ifndef OVPFRAME_FRAMES_HPP_
#define OVPFRAME_FRAMES_HPP_

#include <utility>
#include <vector>

#include "ovpframe/pspace.hpp"

namespace ovp {

// ({A_n}, {Psi_n}) with A_n : X -> Y (e x d) and Psi_n : Y -> X (d x e).
struct FramePair {
  std::vector<Matrix> A;
  std::vector<Matrix> Psi;
  double p = 2.0;
  SpaceDesc X;
  SpaceDesc Y;

  // Validates N >= 1, matching lengths and shapes, p in [1, inf).
  static FramePair make(std::vector<Matrix> A, std::vector<Matrix> Psi, double p,
                        const SpaceDesc &X, const SpaceDesc &Y);

  Index N() const { return static_cast<Index>(A.size()); }
  Index d() const { return X.dim; }
  Index e() const { return Y.dim; }
  BlockSpace block_space() const { return BlockSpace{p, N(), Y}; }
  Space x_space() const { return X; }
};

// Same X, Y, N and p.
bool same_shape(const FramePair &f, const FramePair &g);
void require_same_shape(const FramePair &f, const FramePair &g);

BlockVector analysis(const FramePair &f, const Eigen::Ref<const Vector> &x);
Vector synthesis(const FramePair &f, const BlockVector &z);

// theta_A, (N e) x d: the A_n stacked.
Matrix analysis_matrix(const FramePair &f);
// theta_Psi, d x (N e): the Psi_n side by side.
Matrix synthesis_matrix(const FramePair &f);

// sum_n Psi_n A_n.
Operator frame_operator(const FramePair &f);
// sum_n g.Psi_n f.A_n, i.e. theta_{g.Psi} theta_{f.A}.
Matrix cross_frame_operator(const FramePair &analysis_side, const FramePair &synthesis_side);

struct FrameBounds {
  NormEstimate a;  // 1 / ||S^{-1}||, zero when S is singular
  NormEstimate b;  // ||S||
  NormEstimate c;  // ||theta_A|| : X -> block space
  NormEstimate d;  // ||theta_Psi|| : block space -> X
};

FrameBounds frame_bounds(const FramePair &f, const Config &cfg = {});

enum class FrameKind { NotBessel, Bessel, Frame, ParsevalFrame, RieszBasis };
const char *to_string(FrameKind k);

struct FrameClass {
  FrameKind kind = FrameKind::Bessel;
  bool bessel = true;
  bool frame = false;
  bool parseval = false;
  bool riesz = false;
  double smallest_pivot = 0.0;
  double parseval_residual = 0.0;  // ||S - I||_max
  double riesz_residual = kInf;    // ||P - I||_max, inf when S is singular
};

// Frame: smallest relative pivot of S above cfg.singular_tol. Parseval and
// Riesz: max-norm identity tests at tol. kind is the strongest flag, with
// RieszBasis ranked above ParsevalFrame.
FrameClass classify(const FramePair &f, double tol, const Config &cfg = {});
FrameClass classify(const FramePair &f, const Config &cfg = {});

// theta_A S^{-1} theta_Psi on the block space.
Operator projection_P(const FramePair &f, const Config &cfg = {});

// ({A_n S^{-1}}, {S^{-1} Psi_n}).
FramePair canonical_dual(const FramePair &f, const Config &cfg = {});

// A_n = n-th block row of U, Psi_n = n-th block column of V.
FramePair from_UV(const Eigen::Ref<const Matrix> &U, const Eigen::Ref<const Matrix> &V,
                  const BlockSpace &block, const SpaceDesc &X);
std::pair<Matrix, Matrix> to_UV(const FramePair &f);

// Orthonormal basis of range(M) by column-pivoted QR, rank decided by a
// threshold relative to the largest pivot.
Matrix range_basis(const Eigen::Ref<const Matrix> &M, double rel_tol = 1e-9);

// ({A_n E}, {E^+ P Psi_n}) in the coordinates of the columns E of basisZ.
// Z carries the norm exponent of X.
FramePair restrict_to(const FramePair &f, const Eigen::Ref<const Matrix> &P,
                      const Eigen::Ref<const Matrix> &basisZ, double tol = 1e-9);

// Appends (B, Phi) when I - S = Phi B; the result is Parseval.
FramePair complete_to_parseval(const FramePair &f, const Eigen::Ref<const Matrix> &B,
                               const Eigen::Ref<const Matrix> &Phi, double tol = 1e-9);

struct Reconstruction {
  std::vector<Vector> iterates;  // x_1 .. x_n
  double a = 0.0;                // a.lower used in the step
  double b = 0.0;                // b.upper used in the step
  double ratio = 1.0;            // (b - a) / (b + a)
  NormEstimate step_norm;        // ||I - 2/(a+b) S||
  bool guaranteed = false;       // step_norm.upper <= ratio was certified
  std::vector<double> errors;    // ||x_k - x||, k = 1..n
  int bound_violations = 0;      // only counted when guaranteed
};

// x_k = x_{k-1} + 2/(a+b) (S x - S x_{k-1}), x_0 = 0. When the contraction
// hypothesis is certified, ||x_k - x|| <= ratio^k ||x|| (plus a 1e-12 ||x||
// rounding floor) is checked and violations counted.
Reconstruction iterative_reconstruct(const FramePair &f, const Eigen::Ref<const Vector> &x,
                                     int n_iters, const Config &cfg = {});

}  // namespace ovp

#endif  // OVPFRAME_FRAMES_HPP_
