#include "rchaos/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rchaos/math.hpp"

namespace rchaos {

int ChaosDecomposition::max_order() const {
  return kernels.empty() ? 0 : kernels.rbegin()->first;
}

const Kernel* ChaosDecomposition::find(int order) const {
  auto it = kernels.find(order);
  return it == kernels.end() ? nullptr : &it->second;
}

void ChaosDecomposition::add_kernel(int order, const Kernel& h, double c) {
  auto it = kernels.find(order);
  if (it == kernels.end()) {
    Kernel copy = h;
    copy.scale(c);
    kernels.emplace(order, std::move(copy));
  } else {
    it->second.add_scaled(h, c);
  }
}

double ChaosDecomposition::variance() const {
  double v = 0.0;
  for (const auto& [k, h] : kernels) v += factorial(k) * norm_sq(h);
  return v;
}

double ChaosDecomposition::second_moment() const {
  return constant * constant + variance();
}

void ChaosDecomposition::prune(double eps) {
  for (auto it = kernels.begin(); it != kernels.end();) {
    it->second.prune(eps);
    if (it->second.entries().empty())
      it = kernels.erase(it);
    else
      ++it;
  }
}

double ChaosDecomposition::evaluate(std::uint32_t x_mask,
                                    const RademacherLaw& law) const {
  double s = constant;
  for (const auto& [k, h] : kernels) s += eval_Q(h, x_mask, law);
  return s;
}

HypercubeFunction ChaosDecomposition::to_hypercube(const RademacherLaw& law,
                                                   int exact_cap) const {
  const int n = law.dim();
  if (n > exact_cap)
    throw ResourceError("ChaosDecomposition::to_hypercube: dim exceeds cap");
  HypercubeFunction out(n, 0.0);
  out[0] = constant;
  for (const auto& [order, h] : kernels) {
    if (h.dim() > n)
      throw InputError("ChaosDecomposition::to_hypercube: kernel dim exceeds law dim");
    const double ofact = factorial(order);
    for (const auto& [key, v] : h.entries()) {
      std::uint32_t mask = 0;
      for (int k : key) mask |= 1u << (k - 1);
      out[mask] += ofact * v;
    }
  }
  for (int k = 1; k <= n; ++k) {
    const std::uint32_t bit = 1u << (k - 1);
    const double yp = law.y_plus(k), ym = law.y_minus(k);
    for (std::uint32_t m = 0; m < out.atoms(); ++m) {
      if (m & bit) continue;
      const double a = out[m];
      const double b = out[m | bit];
      out[m] = a + b * ym;
      out[m | bit] = a + b * yp;
    }
  }
  return out;
}

ChaosDecomposition walsh_decompose(const HypercubeFunction& f,
                                   const RademacherLaw& law, double prune_eps) {
  if (f.dim() != law.dim()) throw InputError("walsh_decompose: dimension mismatch");
  const int n = f.dim();
  std::vector<double> c(f.values());
  // Forward butterfly. Every function of x_k is affine in Y_k:
  //   value = a + b Y_k  with  a = p F(+) + q F(-)  (conditional mean)
  //                       and  b = sqrt(pq) (F(+) - F(-))  (= D_k F).
  for (int k = 1; k <= n; ++k) {
    const std::uint32_t bit = 1u << (k - 1);
    const double pk = law.p(k), qk = law.q(k);
    const double s = std::sqrt(pk * qk);
    for (std::uint32_t m = 0; m < f.atoms(); ++m) {
      if (m & bit) continue;
      const double fm = c[m];        // x_k = -1
      const double fp = c[m | bit];  // x_k = +1
      c[m] = pk * fp + qk * fm;
      c[m | bit] = s * (fp - fm);
    }
  }
  ChaosDecomposition d;
  d.dim = n;
  d.constant = c[0];
  for (std::uint32_t mask = 1; mask < f.atoms(); ++mask) {
    if (std::abs(c[mask]) < prune_eps) continue;
    const int m = std::popcount(mask);
    auto it = d.kernels.find(m);
    if (it == d.kernels.end())
      it = d.kernels.emplace(m, Kernel(m, n)).first;
    IndexTuple key;
    key.reserve(m);
    for (int k = 1; k <= n; ++k)
      if (mask & (1u << (k - 1))) key.push_back(k);
    it->second.set(std::move(key), c[mask] / factorial(m));
  }
  return d;
}

std::map<int, double> moments(const Kernel& f, const RademacherLaw& law,
                              const std::vector<int>& powers, int exact_cap) {
  const HypercubeFunction table = HypercubeFunction::from_kernel(f, law, exact_cap);
  std::map<int, double> out;
  for (int m : powers) {
    if (m < 1) throw InputError("moments: powers must be >= 1");
    out[m] = expect_exact(table.pow(m), law);
  }
  return out;
}

ChaosDecomposition multiply_symmetric(const Kernel& f, const Kernel& g) {
  if (f.dim() != g.dim()) throw InputError("multiply_symmetric: dimension mismatch");
  const int p = f.order(), q = g.order();
  ChaosDecomposition d;
  d.dim = f.dim();
  d.assumes_symmetric_law = true;
  for (int r = 0; r <= std::min(p, q); ++r) {
    const double coef = factorial(r) * binomial(p, r) * binomial(q, r);
    const int m = p + q - 2 * r;
    if (m == 0) {
      // r = p = q: coef = p! and the scalar contraction is <f,g>, so this
      // adds p! <f,g> = E[Q_p(f) Q_p(g)].
      d.constant += coef * inner(f, g);
      continue;
    }
    Kernel term = r == 0 ? sym_offdiag_product(f, g)
                         : sym_offdiag_kernel(contract(f, g, r));
    if (!term.entries().empty()) d.add_kernel(m, term, coef);
  }
  d.prune();
  return d;
}

ProductCheckReport product_top_kernel_check(const Kernel& f, const Kernel& g,
                                            const RademacherLaw& law, double tol,
                                            int exact_cap) {
  ProductCheckReport rep;
  const HypercubeFunction product =
      HypercubeFunction::from_kernel(f, law, exact_cap) *
      HypercubeFunction::from_kernel(g, law, exact_cap);
  rep.product = walsh_decompose(product, law, 0.0);
  const int top = f.order() + g.order();
  for (const auto& [order, h] : rep.product.kernels) {
    if (order <= top) continue;
    for (const auto& [key, v] : h.entries())
      rep.above_order_mass = std::max(rep.above_order_mass, std::abs(v));
  }
  const Kernel expected = sym_offdiag_product(f, g);
  if (const Kernel* actual = rep.product.find(top)) {
    rep.top_kernel_deviation = max_coeff_deviation(*actual, expected);
  } else {
    // no top-order part decomposed: deviation is the largest expected entry
    for (const auto& [key, v] : expected.entries())
      rep.top_kernel_deviation = std::max(rep.top_kernel_deviation, std::abs(v));
  }
  rep.product.prune();
  rep.pass = rep.above_order_mass <= tol && rep.top_kernel_deviation <= tol;
  return rep;
}

}  // namespace rchaos
