#ifndef OVPFRAME_TRANSFORMS_HPP_
#define OVPFRAME_TRANSFORMS_HPP_

#include "ovpframe/frames.hpp"

namespace ovp {

// g = (A_n R, L Psi_n).
FramePair similar_transform(const FramePair &f, const Eigen::Ref<const Matrix> &R,
                            const Eigen::Ref<const Matrix> &L, const Config &cfg = {});

struct SimilarityWitness {
  Matrix R;  // right transform
  Matrix L;  // left transform
  double residual = 0.0;  // max entrywise mismatch of the rebuilt g
};

// R = S_f^{-1} theta_Psi theta_B, L = theta_Phi theta_A S_f^{-1}. Throws
// NotSimilar when similar_transform(f, R, L) misses g by more than tol or
// R, L are not invertible.
SimilarityWitness recover_similarity(const FramePair &f, const FramePair &g, double tol = 1e-9,
                                     const Config &cfg = {});

// ||P_f - P_g||_max <= tol.
bool is_similar(const FramePair &f, const FramePair &g, double tol = 1e-9,
                const Config &cfg = {});

struct Dilation {
  FramePair dilated;  // on X1 = X (+) W, flat coordinates, exponent of X
  Matrix embed;       // (d + w) x d, x -> (x, 0)
  Matrix W_basis;     // orthonormal columns spanning range(I - P), (N e) x w
};

// B_n = [A_n, Gamma_n (I - P) Q], Phi_n = [Psi_n; Q^T (I - P) L_n] with Q =
// W_basis. The dilated frame operator is S (+) I_w and its projection is
// the identity on the block space.
Dilation dilate(const FramePair &f, const Config &cfg = {});

}  // namespace ovp

#endif  // OVPFRAME_TRANSFORMS_HPP_
