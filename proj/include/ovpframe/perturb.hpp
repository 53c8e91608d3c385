#ifndef OVPFRAME_PERTURB_HPP_
#define OVPFRAME_PERTURB_HPP_

#include <optional>
#include <string>
#include <vector>

#include "ovpframe/frames.hpp"

namespace ovp {

// Constants of a relative-error inequality
//   ||T1 v - T2 v|| <= alpha ||T1 v|| + gamma ||v|| + beta ||T2 v||.
struct PerturbParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

struct PerturbCertificate {
  PerturbParams synth;     // (alpha, beta, gamma)
  PerturbParams analysis;  // (r, s, t) stored as (alpha, beta, gamma)
  bool hypothesis_ok = false;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::string formula_refs;
  std::string reason;  // why the hypothesis was not certified

  // synthesis perturbation: the condition certified here, with the
  // alpha + gamma / sqrt(a) form reported alongside
  double checked_condition = 0.0;  // max{alpha + gamma ||theta_A S^{-1}||, beta}
  double sqrt_a_condition = 0.0;   // max{alpha + gamma / sqrt(a), beta}
  bool conditions_disagree = false;

  // pair perturbation
  int variant = 0;
  double variant_sum = 0.0;  // summed operator-norm uppers
  std::string invertible_composite;

  // measured on the perturbed pair
  bool perturbed_invertible = false;
  double measured_inverse_norm = 0.0;  // lower estimate of ||S_pert^{-1}||
  double measured_norm = 0.0;          // lower estimate of ||S_pert||
  bool bounds_respected = false;

  // Throws HypothesisNotCertified unless hypothesis_ok.
  void require() const;
};

// Hilding-type check for U, V : X -> Y with U invertible. The hypothesis
//   ||Ux - Vx|| <= alpha ||Ux|| + beta ||Vx||
// is certified by ||(U - V) U^{-1}|| <= alpha and refuted by sampling. On
// success V is inverted and the sandwich
//   (1-alpha)/(1+beta) ||Ux|| <= ||Vx|| <= (1+alpha)/(1-beta) ||Ux||
// is checked on `samples` vectors; lower_bound / upper_bound bound ||Vx||/||x||.
PerturbCertificate hilding_assess(const Operator &U, const Operator &V, double alpha,
                                  double beta, const Config &cfg = {}, int samples = 1000);
PerturbCertificate hilding_check(const Operator &U, const Operator &V, double alpha,
                                 double beta, const Config &cfg = {}, int samples = 1000);

struct PerturbResult {
  PerturbCertificate cert;
  FramePair perturbed;
};

// ({A_n}, {Phi_n}). Without params, gamma = ||theta_Psi - theta_Phi|| and
// alpha = beta = 0. Supplied params are sampled over 10^4 block vectors and
// all partial sums; they are certified only when ||theta_Psi - theta_Phi||
// <= gamma.
PerturbResult perturb_synthesis_assess(const FramePair &f, const std::vector<Matrix> &Phi,
                                       std::optional<PerturbParams> params = std::nullopt,
                                       const Config &cfg = {}, int samples = 10000);
PerturbResult perturb_synthesis(const FramePair &f, const std::vector<Matrix> &Phi,
                                std::optional<PerturbParams> params = std::nullopt,
                                const Config &cfg = {}, int samples = 10000);

// ({B_n}, {Phi_n}) under one of the four summed-norm conditions (variant
// 1..4). Without params, t = ||theta_A - theta_B||, gamma = ||theta_Psi -
// theta_Phi|| and the remaining constants are 0.
PerturbResult perturb_pair_assess(const FramePair &f, const std::vector<Matrix> &B,
                                  const std::vector<Matrix> &Phi, int variant,
                                  std::optional<PerturbParams> analysis_params = std::nullopt,
                                  std::optional<PerturbParams> synth_params = std::nullopt,
                                  const Config &cfg = {}, int samples = 10000);
PerturbResult perturb_pair(const FramePair &f, const std::vector<Matrix> &B,
                           const std::vector<Matrix> &Phi, int variant,
                           std::optional<PerturbParams> analysis_params = std::nullopt,
                           std::optional<PerturbParams> synth_params = std::nullopt,
                           const Config &cfg = {}, int samples = 10000);

}  // namespace ovp

#endif  // OVPFRAME_PERTURB_HPP_
