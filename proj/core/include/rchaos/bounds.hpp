#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rchaos/chaos.hpp"
#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"
#include "rchaos/ou.hpp"

namespace rchaos {

/// gamma_p = (2p)!/p! * sum_{r=1}^p r! C(p,r)^2  (2, 72, 3960, ...).
double gamma_p(int p);

/// E[A B] for two finite decompositions over the same coordinate universe,
/// by orthogonality: A.const * B.const + sum_k k! <a_k, b_k>.
double expect_product(const ChaosDecomposition& a, const ChaosDecomposition& b);

/// Exact W1 distance between a finite atom law and N(0,1): the CDF gap is
/// piecewise |const - Phi|, integrated in closed form on every segment via
/// the antiderivative H(x) = x Phi(x) + phi(x).
double w1_atoms_vs_gaussian(const AtomLaw& atoms);

/// Exact W1 between the law of Q(f; Y) and N(0,1); needs dim <= cap.
double wasserstein_exact(const Kernel& f, const RademacherLaw& law,
                         int exact_cap = kDefaultExactCap);

struct UnivariateOptions {
  int exact_cap = kDefaultExactCap;
  long mc_samples = 1000000;  // used beyond the cap
  std::uint64_t seed = 1;
  int threads = 1;
};

struct BoundReport {
  int order = 0;
  double second_moment = 0.0;
  double fourth_moment = 0.0;
  double fourth_cumulant = 0.0;
  double influence = 0.0;
  std::map<int, double> contraction_norm_sq;  // r -> ||f (x)_r f||^2
  double lhs = 0.0;  // measured W1 distance
  double rhs = 0.0;  // C1 sqrt|kappa4| + C2 sqrt(M)
  std::map<std::string, double> constants;
  bool exact = true;        // moments and lhs by enumeration
  double fourth_moment_se = 0.0;
  double lhs_se = 0.0;
};

/// Fourth-moment-influence Wasserstein bound for normalised Q_p(f):
/// rhs = C1 sqrt|E F^4 - 3| + C2 sqrt(M(f)) with C1 = sqrt(2/pi) + 4/3 and
/// C2 = (sqrt(2/pi) + 2 sqrt(6)/3) sqrt(gamma_p); lhs is the exact (or
/// Monte Carlo) W1 distance to the standard Gaussian.
BoundReport dw_bound_univariate(const Kernel& f, const RademacherLaw& law,
                                const UnivariateOptions& opt = {});

struct FirstChaosReport {
  double sum_h4 = 0.0;          // sum h(k)^4
  double sum_h4_over_pq = 0.0;  // sum h(k)^4 / (p_k q_k)
  double fourth_moment_formula = 0.0;  // 3 + sum h^4 (q-p)^2/(pq) - 2 sum h^4
  std::optional<double> fourth_moment_enum;  // present when dim <= cap
  double dw_bound = 0.0;   // sqrt(sum h^4/(pq))
  double kol_bound = 0.0;  // 2 sqrt(sum h^4/(pq))
  // homogeneous-law extras (all p_k equal)
  bool homogeneous = false;
  double coefficient = 0.0;  // (p^2 + q^2 - 4pq)/(pq)
  bool exact_fm_applicable = false;  // false near p^2 + q^2 - 4pq = 0
  double exact_fm_dw = 0.0;   // ((E F^4 - 3)/(p^2+q^2-4pq))^{1/2}
  double exact_fm_kol = 0.0;  // twice the above
};

/// First-chaos closed forms for normalised h: exact fourth moment,
/// Wasserstein and Berry-Esseen bounds, and (for homogeneous laws) the exact
/// fourth-moment bounds, reported inapplicable when |p^2+q^2-4pq| < 1e-9.
FirstChaosReport first_chaos_exact(const Kernel& h, const RademacherLaw& law,
                                   int exact_cap = kDefaultExactCap);

struct Tech1Report {
  // (lem-1): sum Var J_k(FG) <= E F^2G^2 - 2 E[FG]^2 - VarF VarG + (p+q)! leak
  double lem1_lhs = 0.0, lem1_rhs = 0.0;
  // (lem-2): max{sum Var J_k(F^2), p!^2 sum C(p,r)^2 ||f x_r f||^2}
  //          <= E F^4 - 3 E[F^2]^2 + (2p)! leak_ff
  double lem2_lhs_var = 0.0, lem2_lhs_contr = 0.0, lem2_rhs = 0.0;
  // (lem-3): leak_fg <= sum r! C(p,r)C(q,r) min{||f||^2 M(g), ||g||^2 M(f)}
  double lem3_lhs = 0.0, lem3_rhs = 0.0;
  // (uni) identity: sum Var J_k(F^2) = E F^4 - 3 E[F^2]^2 - contr + (2p)! leak_ff
  double uni_lhs = 0.0, uni_rhs = 0.0;
  // ingredients
  double e_f2g2 = 0.0, e_fg = 0.0, var_f = 0.0, var_g = 0.0;
  double leak_fg = 0.0, leak_ff = 0.0;
};
Tech1Report lemma_tech1_sides(const Kernel& f, const Kernel& g,
                              const RademacherLaw& law,
                              int exact_cap = kDefaultExactCap);

struct UseBoundsReport {
  double var_gamma_over_p = 0.0;  // Var(p^{-1} Gamma(F,F))
  double use1_rhs = 0.0;          // E F^4 - 3 E[F^2]^2 + gamma_p E[F^2] M(f)
  double use2_lhs = 0.0;          // 3 E[F^2 Gamma] - p E F^4
  double use2_rhs = 0.0;          // 2p (E F^4 - 3) + 3p gamma_p M(f)
  double rho = 0.0;               // -4p E F^4 + 12 E[F^2 Gamma] = 4 * use2_lhs
  double rho_rhs = 0.0;           // 4 * use2_rhs
  double fourth_moment = 0.0;
  double influence = 0.0;
};
/// Variance and moment bounds around Gamma(F,F); requires p! ||f||^2 = 1.
UseBoundsReport use_bounds(const Kernel& f, const RademacherLaw& law,
                           int exact_cap = kDefaultExactCap);

using Matrix = std::vector<std::vector<double>>;

struct CovarianceReport {
  Matrix formula;                    // 1{q_i=q_j} q_i! <f_i, f_j>
  std::optional<Matrix> enumeration;  // when dim <= cap
  double max_deviation = 0.0;
};
CovarianceReport covariance_matrix(const std::vector<Kernel>& kernels,
                                   const RademacherLaw& law,
                                   int exact_cap = kDefaultExactCap);

struct MultivariateInput {
  std::vector<Kernel> kernels;  // orders nondecreasing
  RademacherLaw law = RademacherLaw::symmetric(1);
  std::optional<Matrix> target_cov;  // defaults to the computed covariance
  double m2 = 1.0;                   // sup ||D^2 g||_op
  double m3 = 1.0;                   // sup ||D^3 g||_op
};

struct MultivariateOptions {
  int exact_cap = kDefaultExactCap;
  long mc_samples = 200000;  // E[sqrt(sum S^2)] beyond the cap
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MultivariateReport {
  Matrix sigma;
  double lambda_inv_op = 0.0;     // 1/min q_i
  double e_s_norm = 0.0;          // E[sqrt(sum S_ij^2)]
  double e_s_norm_se = 0.0;       // 0 in exact mode
  std::vector<double> rho;        // per component
  double trace_term = 0.0;        // sum_i 2 Lambda_ii Sigma_ii + E[S_ii]
  double term1 = 0.0, term2 = 0.0, rhs = 0.0;
  Matrix var_gamma;               // Var(Gamma(F_i, F_j))
  Matrix cov_sq_terms;            // Cov(F_i^2, F_j^2) - 2 E[F_i F_j]^2
  bool exact = true;
};

/// Right side of the exchangeable-pair smooth-test bound with
/// Lambda = diag(q_1..q_d), S_ij = 2 Gamma(F_i,F_j) - 2 q_j Sigma_ij and
/// rho_i = -4 q_i E[F_i^4] + 12 E[F_i^2 Gamma(F_i,F_i)]. Exact within the
/// cap; beyond it the law must be symmetric (kernel-level expansion, with
/// E[sqrt(sum S^2)] estimated by Monte Carlo).
MultivariateReport multivariate_bound(const MultivariateInput& input,
                                      const MultivariateOptions& opt = {});

struct Step2Report {
  bool equal_orders = false;
  // p = q decomposition of Cov(F^2,G^2) - 2 E[FG]^2 into three terms
  double term1 = 0.0, term2 = 0.0, term3 = 0.0;
  double term1_bound = 0.0, term2_bound = 0.0, term3_bound = 0.0;
  double identity_exact = 0.0;  // Cov(F^2,G^2) - 2 E[FG]^2 by enumeration
  double identity_sum = 0.0;    // term1 + term2 + term3
  // p < q: |Cov(F^2, G^2)| and its bound
  double cov_abs = 0.0, cov_bound = 0.0;
};
/// Step-2 covariance analysis; kernels are swapped internally so that
/// order(f) <= order(g).
Step2Report step2_covariance_terms(const Kernel& f, const Kernel& g,
                                   const RademacherLaw& law,
                                   int exact_cap = kDefaultExactCap);

}  // namespace rchaos
