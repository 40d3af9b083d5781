#pragma once

#include <cstdint>
#include <vector>

#include "rchaos/chaos.hpp"
#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"

namespace rchaos {

/// Ornstein-Uhlenbeck generator: order-k kernel scaled by -k, constant to 0.
ChaosDecomposition apply_L(const ChaosDecomposition& d);

/// Semigroup P_t: order-k kernel scaled by e^{-kt}; t < 0 is an input error.
ChaosDecomposition apply_Pt(const ChaosDecomposition& d, double t);

/// Carre du champ of F = Q_p(f), G = Q_q(g), assembled by rescaling the
/// product decomposition: Gamma = (p+q)/2 E[FG] + sum_k (p+q-k)/2 J_k(FG).
ChaosDecomposition carre_du_champ(const Kernel& f, const Kernel& g,
                                  const RademacherLaw& law,
                                  int exact_cap = kDefaultExactCap);

struct VarGamma {
  double exact = 0.0;  // sum_k ((p+q-k)/2)^2 Var(J_k(FG))
  double bound = 0.0;  // max{p^2, q^2} sum_k Var(J_k(FG)), k = 1..p+q-1
};
VarGamma var_gamma(const Kernel& f, const Kernel& g, const RademacherLaw& law,
                   int exact_cap = kDefaultExactCap);

/// One draw of the exponential-clock coupling X^t given X = x: every
/// coordinate is kept with probability e^{-t} and redrawn from the law
/// otherwise. Deterministic in (seed, counter, coordinate).
std::uint32_t couple_sample(std::uint32_t x_mask, double t, const RademacherLaw& law,
                            std::uint64_t seed, std::uint64_t counter = 0);

/// P_t F via the Mehler representation, evaluated exactly: one pass per
/// coordinate applies the mixture e^{-t} * keep + (1-e^{-t}) * resample-mean.
HypercubeFunction mehler_pt(const HypercubeFunction& f, double t,
                            const RademacherLaw& law);

/// max |mehler_pt(F) - P_t applied to the Walsh decomposition of F|.
double mehler_check(const HypercubeFunction& f, double t, const RademacherLaw& law);

struct ExchangeabilityReport {
  bool pass = false;
  double max_asymmetry = 0.0;  // max |P(F=a, F_t=b) - P(F=b, F_t=a)|
  int distinct_values = 0;
};

/// Builds the exact joint law of (F, F_t) over all (x, z) sign-vector pairs
/// and checks its symmetry under swapping the two components.
ExchangeabilityReport exchangeability_check(const Kernel& f, double t,
                                            const RademacherLaw& law,
                                            double tol = 1e-12,
                                            int pair_cap = 10);

struct RegressionRow {
  double t = 0.0;
  double dist_a = 0.0;   // || E[F_t - F | X]/t + p F ||_{L^2}
  double dist_b = 0.0;   // || E[(F_t-F)(G_t-G) | X]/t - 2 Gamma(F,G) ||_{L^2}
  double c_value = 0.0;  // E[(F_t - F)^4]/t
};

struct RegressionReport {
  std::vector<RegressionRow> rows;
  double rho = 0.0;            // -4p E[F^4] + 12 E[F^2 Gamma(F,F)]
  double c_extrapolated = 0.0; // polynomial extrapolation of c_value to t = 0
};

/// Exact regression diagnostics on a t-grid; the second kernel g enters the
/// (b) condition (defaults to f itself when null).
RegressionReport regression_check(const Kernel& f, const RademacherLaw& law,
                                  const std::vector<double>& t_grid,
                                  const Kernel* g = nullptr,
                                  int exact_cap = kDefaultExactCap);

}  // namespace rchaos
