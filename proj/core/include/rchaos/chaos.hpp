#pragma once

#include <map>
#include <vector>

#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"

namespace rchaos {

/// Finite chaos decomposition F = constant + sum_k Q_k(h_k) with one
/// symmetric off-diagonal kernel per order.
struct ChaosDecomposition {
  int dim = 0;
  double constant = 0.0;
  std::map<int, Kernel> kernels;  // order -> kernel, orders >= 1
  /// Set by multiply_symmetric: the expansion is valid under p_k = 1/2 only.
  bool assumes_symmetric_law = false;

  int max_order() const;
  const Kernel* find(int order) const;
  void add_kernel(int order, const Kernel& h, double coefficient = 1.0);

  /// sum_k k! ||h_k||^2 (the variance of the represented variable).
  double variance() const;
  /// constant^2 + variance().
  double second_moment() const;

  /// Drops kernel coefficients below eps and empty kernels.
  void prune(double eps = 1e-15);

  /// Point evaluation constant + sum_k Q_k(h_k; Y(x)).
  double evaluate(std::uint32_t x_mask, const RademacherLaw& law) const;

  /// Full value table via the inverse butterfly (O(N 2^N)).
  HypercubeFunction to_hypercube(const RademacherLaw& law,
                                 int exact_cap = kDefaultExactCap) const;
};

/// Chaos kernels of F by the biased Walsh transform: one butterfly pass per
/// coordinate turns point values into multilinear coefficients in Y, which is
/// the Stroock formula h_m(k_1..k_m) = E[D^(m) F]/m! evaluated in O(N 2^N).
/// Coefficients below prune_eps are dropped.
ChaosDecomposition walsh_decompose(const HypercubeFunction& f,
                                   const RademacherLaw& law,
                                   double prune_eps = 1e-15);

/// Exact E[Q(f)^m] for each requested power m, by enumeration.
std::map<int, double> moments(const Kernel& f, const RademacherLaw& law,
                              const std::vector<int>& powers,
                              int exact_cap = kDefaultExactCap);

/// Product expansion in the symmetric case:
/// Q_p(f) Q_q(g) = sum_r r! C(p,r) C(q,r) Q_{p+q-2r}(f (x)~_r g restricted
/// off-diagonal); the r = p = q term contributes the constant p! <f,g>.
ChaosDecomposition multiply_symmetric(const Kernel& f, const Kernel& g);

struct ProductCheckReport {
  bool pass = false;
  double top_kernel_deviation = 0.0;  // max |top kernel - f (x)~ g 1_Delta|
  double above_order_mass = 0.0;      // max |coefficient| at orders > p+q
  ChaosDecomposition product;
};

/// Decomposes the pointwise product Q_p(f) Q_q(g) under an arbitrary law and
/// checks that (i) nothing lives above order p+q, (ii) the top kernel equals
/// sym_offdiag_product(f, g).
ProductCheckReport product_top_kernel_check(const Kernel& f, const Kernel& g,
                                            const RademacherLaw& law,
                                            double tol = 1e-10,
                                            int exact_cap = kDefaultExactCap);

}  // namespace rchaos
