#ifndef OVPFRAME_DUALITY_HPP_
#define OVPFRAME_DUALITY_HPP_

#include <utility>

#include "ovpframe/frames.hpp"

namespace ovp {

// For f = (A, Psi), g = (B, Phi):
//   residual_left  = ||theta_Phi theta_A - target||_max
//   residual_right = ||theta_Psi theta_B - target||_max
// with target I for duality and 0 for orthogonality.
struct DualCertificate {
  double residual_left = 0.0;
  double residual_right = 0.0;
  bool verdict = false;
};

DualCertificate is_dual(const FramePair &f, const FramePair &g, double tol = 1e-9);
DualCertificate is_orthogonal(const FramePair &f, const FramePair &g, double tol = 1e-9);

// theta_A S^{-1} + (I - P) U, a right inverse of theta_Psi.
Matrix right_inverse(const FramePair &f, const Eigen::Ref<const Matrix> &U,
                     const Config &cfg = {});
// S^{-1} theta_Psi + V (I - P), a left inverse of theta_A.
Matrix left_inverse(const FramePair &f, const Eigen::Ref<const Matrix> &V,
                    const Config &cfg = {});

// The dual with analysis matrix right_inverse(f, U) and synthesis matrix
// left_inverse(f, V). Throws SingularOperator if S or its frame operator
// S^{-1} + V U - V theta_A S^{-1} theta_Psi U is not invertible.
FramePair dual_from_params(const FramePair &f, const Eigen::Ref<const Matrix> &U,
                           const Eigen::Ref<const Matrix> &V, const Config &cfg = {});
// (theta_B, theta_Phi): parameters that reproduce the dual g.
std::pair<Matrix, Matrix> params_of_dual(const FramePair &g);

// ({A_n C + B_n D}, {E Psi_n + F Phi_n}) for orthogonal Parseval f, g and
// E C + F D = I.
FramePair interpolate_orthogonal(const FramePair &f, const FramePair &g,
                                 const Eigen::Ref<const Matrix> &C,
                                 const Eigen::Ref<const Matrix> &D,
                                 const Eigen::Ref<const Matrix> &E,
                                 const Eigen::Ref<const Matrix> &F, double tol = 1e-9);

// On X (+) X, flat coordinates with the norm exponent of X:
// A_n (+) B_n = [A_n B_n], Psi_n (+) Phi_n = [Psi_n; Phi_n].
FramePair direct_sum(const FramePair &f, const FramePair &g, double tol = 1e-9);

// C_n = A_n S_f^{-1} + B_n S_g^{-1}, Xi_n = S_f^{-1} Psi_n + S_g^{-1} Phi_n;
// dual to both f and g.
FramePair common_dual(const FramePair &f, const FramePair &g, double tol = 1e-9,
                      const Config &cfg = {});

// Index (n, m) -> n * N_g + m, elements A_n (x) B_m and Psi_n (x) Phi_m.
// X (x) X' and Y (x) Y' use flat coordinates with the first factor's
// exponents. f and g must share p.
FramePair tensor_product(const FramePair &f, const FramePair &g);

struct ApproxDualCertificate {
  NormEstimate gap_left;   // ||I - theta_Phi theta_A||
  NormEstimate gap_right;  // ||I - theta_Psi theta_B||
  bool verdict = false;    // both uppers < 1
  // ||x - theta_Phi theta_A x|| < ||x|| on every sampled x (and likewise
  // on the other side); only meaningful when verdict holds.
  bool samples_ok = true;
};

ApproxDualCertificate is_approx_dual(const FramePair &f, const FramePair &g,
                                     const Config &cfg = {}, int samples = 64);

// (dual of f, dual of g):
//   ({B_n S_{B,Psi}^{-1}}, {S_{A,Phi}^{-1} Phi_n}) and
//   ({A_n S_{A,Phi}^{-1}}, {S_{B,Psi}^{-1} Psi_n}).
std::pair<FramePair, FramePair> exact_dual_from_approx(const FramePair &f, const FramePair &g,
                                                       const Config &cfg = {});

// ({B_n U}, {V Phi_n}) for a dual g of f and ||I - U||, ||I - V|| < 1
// (certified, else HypothesisNotCertified).
FramePair approx_dual_from_scaled(const FramePair &f, const FramePair &g,
                                  const Eigen::Ref<const Matrix> &U,
                                  const Eigen::Ref<const Matrix> &V, const Config &cfg = {});

struct NeumannDual {
  FramePair pair;
  NormEstimate base_left;   // ||I - S_{A,Phi}||
  NormEstimate base_right;  // ||I - S_{B,Psi}||
  NormEstimate gap_left;    // ||I - theta_Xi theta_A|| after truncation
  NormEstimate gap_right;   // ||I - theta_Psi theta_C||
  double bound_left = 0.0;  // base_left.upper^(N+1)
  double bound_right = 0.0;
  bool bounds_ok = false;   // measured lower gaps within the bounds (+1e-9)
};

// C_n = B_n sum_{m=0}^{Ncap} (I - S_{B,Psi})^m,
// Xi_n = sum_{m=0}^{Ncap} (I - S_{A,Phi})^m Phi_n.
NeumannDual neumann_truncated_dual(const FramePair &f, const FramePair &g, int Ncap,
                                   const Config &cfg = {});

struct PerturbedApproxReport {
  NormEstimate R;  // ||theta_A - theta_C||
  NormEstimate Q;  // ||theta_Xi - theta_Psi||
  NormEstimate c;  // analysis bound of the dual
  NormEstimate d;  // synthesis bound of the dual
  bool hypothesis = false;  // d R < 1 and c Q < 1 on upper bounds
  ApproxDualCertificate certificate;
  // When the hypothesis holds: verdict true, gap_left.lower <= dR and
  // gap_right.lower <= cQ.
  bool verdict = true;
};

// f a Bessel pair near the frame ref = (C, Xi), dual = (B, Phi) a dual of ref.
PerturbedApproxReport perturbed_approx_dual_check(const FramePair &f, const FramePair &ref,
                                                  const FramePair &dual, double tol = 1e-9,
                                                  const Config &cfg = {});

}  // namespace ovp

#endif  // OVPFRAME_DUALITY_HPP_
