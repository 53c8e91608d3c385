#include "ovpframe/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ovpframe/random.hpp"

namespace ovp {

namespace {

constexpr double kSlack = 1e-12;

void check_params(const PerturbParams &q, const char *what) {
  if (!(q.alpha >= 0) || !(q.beta >= 0) || !(q.gamma >= 0)) {
    std::ostringstream os;
    os << what << ": constants must be nonnegative";
    throw PreconditionFailed(what, os.str());
  }
}

// Samples the inequality
//   ||sum_{n<=m} (T1_n - T2_n) v_n|| <= alpha ||sum T1_n v_n|| + gamma ||v|| + beta ||sum T2_n v_n||
// for m = 1..N over random v. The blocks of T1, T2 are column blocks of
// width w acting on v (synthesis side) or row blocks acting on x
// (analysis side, where the "partial sum" keeps the first m row blocks).
// Returns false on the first violated sample.
bool sample_synthesis(const Matrix &T1, const Matrix &T2, const BlockSpace &block,
                      const Space &X, const PerturbParams &q, int samples, CounterRng rng) {
  const Space Z = block;
  const Index e = block.factor.dim;
  for (int k = 0; k < samples; ++k) {
    Vector z = rng.vector(block.dim());
    if (k % 2 == 1) {  // sparse sample: one live block
      const Index n = rng.index(block.N);
      const Vector zn = z.segment(n * e, e);
      z.setZero();
      z.segment(n * e, e) = zn;
    }
    const double nz = Z.norm(z);
    Vector s1 = Vector::Zero(X.dim()), s2 = Vector::Zero(X.dim());
    for (Index n = 0; n < block.N; ++n) {
      s1 += T1.middleCols(n * e, e) * z.segment(n * e, e);
      s2 += T2.middleCols(n * e, e) * z.segment(n * e, e);
      const double lhs = X.norm(s1 - s2);
      const double rhs = q.alpha * X.norm(s1) + q.gamma * nz + q.beta * X.norm(s2);
      if (lhs > rhs * (1 + kSlack) + kSlack * nz) return false;
    }
  }
  return true;
}

bool sample_analysis(const Matrix &T1, const Matrix &T2, const BlockSpace &block,
                     const Space &X, const PerturbParams &q, int samples, CounterRng rng) {
  const Index e = block.factor.dim;
  for (int k = 0; k < samples; ++k) {
    const Vector x = rng.vector(X.dim());
    const double nx = X.norm(x);
    const Vector y1 = T1 * x, y2 = T2 * x;
    for (Index m = 1; m <= block.N; ++m) {
      const Space Zm = BlockSpace{block.p, m, block.factor};
      const Index len = m * e;
      const double lhs = Zm.norm(y1.head(len) - y2.head(len));
      const double rhs = q.alpha * Zm.norm(y1.head(len)) + q.gamma * nx +
                         q.beta * Zm.norm(y2.head(len));
      if (lhs > rhs * (1 + kSlack) + kSlack * nx) return false;
    }
  }
  return true;
}

// Inverts the perturbed frame operator and records its measured norms.
void measure(PerturbCertificate &c, const FramePair &g, const Config &cfg) {
  const Matrix S = frame_operator(g).entries;
  try {
    const Matrix Sinv = invert(S, cfg);
    c.perturbed_invertible = true;
    c.measured_inverse_norm = operator_norm(Sinv, g.X, g.X, cfg).lower;
  } catch (const SingularOperator &) {
    c.perturbed_invertible = false;
  }
  c.measured_norm = operator_norm(S, g.X, g.X, cfg).lower;
  c.bounds_respected = c.perturbed_invertible &&
                       c.measured_inverse_norm <= (1.0 / c.lower_bound) * (1.0 + 1e-9) &&
                       c.measured_norm <= c.upper_bound * (1.0 + 1e-9);
}

std::vector<Matrix> checked_list(const std::vector<Matrix> &L, const FramePair &f, bool analysis,
                                 const char *name) {
  if (static_cast<Index>(L.size()) != f.N()) {
    std::ostringstream os;
    os << name << " must have N = " << f.N() << " elements";
    throw DimensionMismatch(os.str());
  }
  for (const Matrix &M : L) {
    const Index r = analysis ? f.e() : f.d(), c = analysis ? f.d() : f.e();
    if (M.rows() != r || M.cols() != c) {
      std::ostringstream os;
      os << name << " elements must be " << r << "x" << c;
      throw DimensionMismatch(os.str());
    }
  }
  return L;
}

}  // namespace

void PerturbCertificate::require() const {
  if (!hypothesis_ok) throw HypothesisNotCertified(reason.empty() ? "hypothesis not certified" : reason);
}

PerturbCertificate hilding_assess(const Operator &U, const Operator &V, double alpha,
                                  double beta, const Config &cfg, int samples) {
  if (!(alpha >= 0 && alpha < 1) || !(beta >= 0 && beta < 1))
    throw PreconditionFailed("alpha, beta", "must lie in [0, 1)");
  if (!(U.domain == V.domain) || !(U.codomain == V.codomain) ||
      U.entries.rows() != V.entries.rows() || U.entries.cols() != V.entries.cols())
    throw DimensionMismatch("U and V must share domain and codomain");
  PerturbCertificate c;
  c.synth = {alpha, beta, 0.0};
  c.formula_refs =
      "sufficient: ||(U - V) U^{-1}|| <= alpha; "
      "(1-alpha)/(1+beta) ||Ux|| <= ||Vx|| <= (1+alpha)/(1-beta) ||Ux||; "
      "||V^{-1}|| <= (1+beta)/(1-alpha) ||U^{-1}||";
  const Matrix Uinv = invert(U.entries, cfg);
  const NormEstimate rel =
      operator_norm(Matrix((U.entries - V.entries) * Uinv), U.codomain, U.codomain, cfg);
  const NormEstimate nU = operator_norm(U, cfg);
  const NormEstimate nUinv = operator_norm(Uinv, U.codomain, U.domain, cfg);

  // sampling can only refute
  CounterRng rng(cfg.power_seed, hash_name("hilding"));
  bool refuted = false;
  for (int k = 0; k < samples && !refuted; ++k) {
    const Vector x = rng.vector(U.domain.dim());
    const double lhs = U.codomain.norm(U.entries * x - V.entries * x);
    const double rhs = alpha * U.codomain.norm(U.entries * x) + beta * U.codomain.norm(V.entries * x);
    if (lhs > rhs * (1 + kSlack) + kSlack * U.domain.norm(x)) refuted = true;
  }
  if (refuted) {
    c.reason = "hypothesis refuted by a sampled vector";
    return c;
  }
  if (!(rel.upper <= alpha * (1 + kSlack))) {
    std::ostringstream os;
    os << "||(U - V) U^{-1}|| <= " << rel.upper << " exceeds alpha = " << alpha;
    c.reason = os.str();
    return c;
  }
  c.hypothesis_ok = true;
  c.lower_bound = ((1 - alpha) / (1 + beta)) / nUinv.upper;
  c.upper_bound = ((1 + alpha) / (1 - beta)) * nU.upper;

  bool ok = true;
  try {
    const Matrix Vinv = invert(V.entries, cfg);
    c.perturbed_invertible = true;
    c.measured_inverse_norm = operator_norm(Vinv, V.codomain, V.domain, cfg).lower;
    ok = c.measured_inverse_norm <= ((1 + beta) / (1 - alpha)) * nUinv.upper * (1 + 1e-9);
  } catch (const SingularOperator &) {
    c.perturbed_invertible = false;
    ok = false;
  }
  c.measured_norm = operator_norm(V, cfg).lower;
  ok = ok && c.measured_norm <= c.upper_bound * (1 + 1e-9);
  CounterRng srng(cfg.power_seed, hash_name("hilding-sandwich"));
  for (int k = 0; k < samples && ok; ++k) {
    const Vector x = srng.vector(U.domain.dim());
    const double nu = U.codomain.norm(U.entries * x);
    const double nv = V.codomain.norm(V.entries * x);
    if (nv < ((1 - alpha) / (1 + beta)) * nu * (1 - 1e-12)) ok = false;
    if (nv > ((1 + alpha) / (1 - beta)) * nu * (1 + 1e-12)) ok = false;
  }
  c.bounds_respected = ok;
  return c;
}

PerturbCertificate hilding_check(const Operator &U, const Operator &V, double alpha,
                                 double beta, const Config &cfg, int samples) {
  PerturbCertificate c = hilding_assess(U, V, alpha, beta, cfg, samples);
  c.require();
  return c;
}

// ||D z|| <= alpha ||theta_Psi z|| + beta ||theta_Phi z|| + gamma ||z|| with
// D = theta_Psi - theta_Phi, certified by D = M theta + R for theta one of the
// two synthesis matrices: ||D z|| <= ||M|| ||theta z|| + ||R|| ||z||.
static bool synthesis_certified(const Matrix &TPsi, const Matrix &TPhi, const BlockSpace &block, const Space &X,
                                const PerturbParams &prm, const NormEstimate &diff, const Config &cfg) {
  if (diff.upper <= prm.gamma * (1 + kSlack)) return true;
  const Matrix D = TPsi - TPhi;
  const double tiny = kSlack * (1 + diff.upper);
  for (const auto &[T, weight] : {std::pair{&TPsi, prm.alpha}, std::pair{&TPhi, prm.beta}}) {
    if (weight <= 0) continue;
    const Matrix M = T->transpose().completeOrthogonalDecomposition().solve(D.transpose()).transpose();
    const Matrix R = D - M * *T;
    if (operator_norm(M, X, X, cfg).upper <= weight * (1 + kSlack) + tiny &&
        operator_norm(R, block, X, cfg).upper <= prm.gamma * (1 + kSlack) + tiny)
      return true;
  }
  return false;
}

PerturbResult perturb_synthesis_assess(const FramePair &f, const std::vector<Matrix> &Phi,
                                       std::optional<PerturbParams> params, const Config &cfg,
                                       int samples) {
  FramePair g = f;
  g.Psi = checked_list(Phi, f, false, "Phi");
  PerturbResult res{{}, g};
  PerturbCertificate &c = res.cert;
  c.formula_refs =
      "hypothesis: max{alpha + gamma ||theta_A S^{-1}||, beta} < 1; "
      "||S_{A,Phi}^{-1}|| <= ||S^{-1}|| (1+beta) / (1 - (alpha + gamma ||theta_A S^{-1}||)); "
      "||S_{A,Phi}|| <= ||theta_A|| ((1+alpha) ||theta_Psi|| + gamma) / (1-beta)";

  const BlockSpace block = f.block_space();
  const Space X = f.X;
  const Matrix TA = analysis_matrix(f);
  const Matrix TPsi = synthesis_matrix(f), TPhi = synthesis_matrix(g);
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  const NormEstimate diff = operator_norm(Matrix(TPsi - TPhi), block, X, cfg);

  if (params) {
    check_params(*params, "alpha, beta, gamma");
    c.synth = *params;
    if (!sample_synthesis(TPsi, TPhi, block, X, c.synth, samples,
                          CounterRng(cfg.power_seed, hash_name("synthesis-samples")))) {
      c.reason = "synthesis inequality refuted by a sampled block vector";
      return res;
    }
    if (!synthesis_certified(TPsi, TPhi, block, X, c.synth, diff, cfg)) {
      std::ostringstream os;
      os << "cannot certify the synthesis inequality: ||theta_Psi - theta_Phi|| <= " << diff.upper
         << " and no split D = M theta + R with ||M|| <= alpha (or beta), ||R|| <= gamma = "
         << c.synth.gamma;
      c.reason = os.str();
      return res;
    }
  } else {
    c.synth = {0.0, 0.0, diff.upper};
  }
  const auto [alpha, beta, gamma] = c.synth;

  const NormEstimate tASinv = operator_norm(Matrix(TA * Sinv), X, block, cfg);
  const NormEstimate nSinv = operator_norm(Sinv, X, X, cfg);
  const NormEstimate nTA = operator_norm(TA, X, block, cfg);
  const NormEstimate nTPsi = operator_norm(TPsi, block, X, cfg);
  const double a_lower = nSinv.upper > 0 ? 1.0 / nSinv.upper : 0.0;

  const double lead = alpha + gamma * tASinv.upper;
  c.checked_condition = std::max(lead, beta);
  c.sqrt_a_condition = std::max(alpha + (a_lower > 0 ? gamma / std::sqrt(a_lower) : kInf), beta);
  c.conditions_disagree = (c.checked_condition < 1.0) != (c.sqrt_a_condition < 1.0);
  if (!(c.checked_condition < 1.0)) {
    std::ostringstream os;
    os << "max{alpha + gamma ||theta_A S^{-1}||, beta} = " << c.checked_condition << " >= 1";
    c.reason = os.str();
    return res;
  }
  c.hypothesis_ok = true;
  c.lower_bound = (1.0 - lead) / (nSinv.upper * (1.0 + beta));
  c.upper_bound = nTA.upper * ((1.0 + alpha) * nTPsi.upper + gamma) / (1.0 - beta);
  measure(c, g, cfg);
  return res;
}

PerturbResult perturb_synthesis(const FramePair &f, const std::vector<Matrix> &Phi,
                                std::optional<PerturbParams> params, const Config &cfg,
                                int samples) {
  PerturbResult r = perturb_synthesis_assess(f, Phi, params, cfg, samples);
  r.cert.require();
  return r;
}

PerturbResult perturb_pair_assess(const FramePair &f, const std::vector<Matrix> &B,
                                  const std::vector<Matrix> &Phi, int variant,
                                  std::optional<PerturbParams> analysis_params,
                                  std::optional<PerturbParams> synth_params, const Config &cfg,
                                  int samples) {
  if (variant < 1 || variant > 4) throw PreconditionFailed("variant", "must be 1, 2, 3 or 4");
  FramePair g = f;
  g.A = checked_list(B, f, true, "B");
  g.Psi = checked_list(Phi, f, false, "Phi");
  PerturbResult res{{}, g};
  PerturbCertificate &c = res.cert;
  c.variant = variant;

  const BlockSpace block = f.block_space();
  const Space X = f.X;
  const Matrix TA = analysis_matrix(f), TB = analysis_matrix(g);
  const Matrix TPsi = synthesis_matrix(f), TPhi = synthesis_matrix(g);
  const Matrix Sinv = invert(frame_operator(f).entries, cfg);
  const NormEstimate dA = operator_norm(Matrix(TA - TB), X, block, cfg);
  const NormEstimate dPsi = operator_norm(Matrix(TPsi - TPhi), block, X, cfg);

  if (analysis_params) {
    check_params(*analysis_params, "r, s, t");
    c.analysis = *analysis_params;
  } else {
    c.analysis = {0.0, 0.0, dA.upper};
  }
  if (synth_params) {
    check_params(*synth_params, "alpha, beta, gamma");
    c.synth = *synth_params;
  } else {
    c.synth = {0.0, 0.0, dPsi.upper};
  }
  const auto [r, s, t] = c.analysis;
  const auto [alpha, beta, gamma] = c.synth;
  c.formula_refs =
      "variant sum < 1; "
      "||S_{B,Phi}|| <= ((1+alpha)/(1-beta) ||theta_Psi|| + gamma/(1-beta)) "
      "((1+r)/(1-s) ||theta_A|| + t/(1-s)); ||S_{B,Phi}^{-1}|| <= ||S^{-1}|| / (1 - sum)";
  if (!(beta < 1.0) || !(s < 1.0)) {
    c.reason = "need max{beta, s} < 1";
    return res;
  }
  if (analysis_params) {
    if (!sample_analysis(TA, TB, block, X, c.analysis, samples,
                         CounterRng(cfg.power_seed, hash_name("analysis-samples")))) {
      c.reason = "analysis inequality refuted by a sampled vector";
      return res;
    }
    if (!(dA.upper <= t * (1 + kSlack))) {
      std::ostringstream os;
      os << "cannot certify the analysis inequality: ||theta_A - theta_B|| <= " << dA.upper
         << " exceeds t = " << t;
      c.reason = os.str();
      return res;
    }
  }
  if (synth_params) {
    if (!sample_synthesis(TPsi, TPhi, block, X, c.synth, samples,
                          CounterRng(cfg.power_seed, hash_name("synthesis-samples")))) {
      c.reason = "synthesis inequality refuted by a sampled block vector";
      return res;
    }
    if (!(dPsi.upper <= gamma * (1 + kSlack))) {
      std::ostringstream os;
      os << "cannot certify the synthesis inequality: ||theta_Psi - theta_Phi|| <= " << dPsi.upper
         << " exceeds gamma = " << gamma;
      c.reason = os.str();
      return res;
    }
  }

  double sum = 0.0;
  for (Index n = 0; n < f.N(); ++n) {
    const Matrix PA = f.Psi[n] * f.A[n], PB = g.Psi[n] * g.A[n];
    Matrix term;
    switch (variant) {
      case 1: term = (PA - PB) * Sinv; break;
      case 2: term = Sinv * (PA - PB); break;
      case 3: term = Sinv * PA - PB * Sinv; break;
      default: term = PA * Sinv - Sinv * PB; break;
    }
    sum += operator_norm(term, X, X, cfg).upper;
  }
  c.variant_sum = sum;
  c.invertible_composite = (variant == 1 || variant == 3) ? "S_{B,Phi} S^{-1}" : "S^{-1} S_{B,Phi}";
  if (!(sum < 1.0)) {
    std::ostringstream os;
    os << "variant " << variant << " sum = " << sum << " >= 1";
    c.reason = os.str();
    return res;
  }
  const NormEstimate nSinv = operator_norm(Sinv, X, X, cfg);
  const NormEstimate nTA = operator_norm(TA, X, block, cfg);
  const NormEstimate nTPsi = operator_norm(TPsi, block, X, cfg);
  c.hypothesis_ok = true;
  c.lower_bound = (1.0 - sum) / nSinv.upper;
  c.upper_bound = ((1 + alpha) / (1 - beta) * nTPsi.upper + gamma / (1 - beta)) *
                  ((1 + r) / (1 - s) * nTA.upper + t / (1 - s));
  measure(c, g, cfg);
  return res;
}

PerturbResult perturb_pair(const FramePair &f, const std::vector<Matrix> &B,
                           const std::vector<Matrix> &Phi, int variant,
                           std::optional<PerturbParams> analysis_params,
                           std::optional<PerturbParams> synth_params, const Config &cfg,
                           int samples) {
  PerturbResult r =
      perturb_pair_assess(f, B, Phi, variant, analysis_params, synth_params, cfg, samples);
  r.cert.require();
  return r;
}

}  // namespace ovp
