#include "rchaos/ou.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rchaos/math.hpp"
#include "rchaos/rng.hpp"

namespace rchaos {

ChaosDecomposition apply_L(const ChaosDecomposition& d) {
  ChaosDecomposition out = d;
  out.constant = 0.0;
  for (auto& [k, h] : out.kernels) h.scale(-static_cast<double>(k));
  return out;
}

ChaosDecomposition apply_Pt(const ChaosDecomposition& d, double t) {
  if (t < 0.0) throw InputError("apply_Pt: t must be >= 0");
  ChaosDecomposition out = d;
  for (auto& [k, h] : out.kernels) h.scale(std::exp(-static_cast<double>(k) * t));
  return out;
}

ChaosDecomposition carre_du_champ(const Kernel& f, const Kernel& g,
                                  const RademacherLaw& law, int exact_cap) {
  const int p = f.order(), q = g.order();
  const HypercubeFunction product =
      HypercubeFunction::from_kernel(f, law, exact_cap) *
      HypercubeFunction::from_kernel(g, law, exact_cap);
  ChaosDecomposition d = walsh_decompose(product, law);
  ChaosDecomposition gamma;
  gamma.dim = d.dim;
  gamma.constant = 0.5 * (p + q) * d.constant;
  for (const auto& [k, h] : d.kernels) {
    const double w = 0.5 * (p + q - k);
    if (w != 0.0) gamma.add_kernel(k, h, w);
  }
  gamma.prune();
  return gamma;
}

VarGamma var_gamma(const Kernel& f, const Kernel& g, const RademacherLaw& law,
                   int exact_cap) {
  const int p = f.order(), q = g.order();
  const HypercubeFunction product =
      HypercubeFunction::from_kernel(f, law, exact_cap) *
      HypercubeFunction::from_kernel(g, law, exact_cap);
  const ChaosDecomposition d = walsh_decompose(product, law);
  VarGamma out;
  double var_sum = 0.0;
  for (const auto& [k, h] : d.kernels) {
    const double var_jk = factorial(k) * norm_sq(h);
    if (k <= p + q - 1) var_sum += var_jk;
    const double w = 0.5 * (p + q - k);
    out.exact += w * w * var_jk;
  }
  out.bound = std::max(p * p, q * q) * var_sum;
  return out;
}

std::uint32_t couple_sample(std::uint32_t x_mask, double t, const RademacherLaw& law,
                            std::uint64_t seed, std::uint64_t counter) {
  if (t < 0.0) throw InputError("couple_sample: t must be >= 0");
  const double keep = std::exp(-t);
  std::uint32_t out = x_mask;
  for (int k = 1; k <= law.dim(); ++k) {
    CounterRng rng = CounterRng::stream(seed, counter, static_cast<std::uint64_t>(k));
    if (rng.next_unit() < keep) continue;  // clock has not rung
    const std::uint32_t bit = 1u << (k - 1);
    if (rng.next_unit() < law.p(k))
      out |= bit;
    else
      out &= ~bit;
  }
  return out;
}

HypercubeFunction mehler_pt(const HypercubeFunction& f, double t,
                            const RademacherLaw& law) {
  if (t < 0.0) throw InputError("mehler_pt: t must be >= 0");
  if (f.dim() != law.dim()) throw InputError("mehler_pt: dimension mismatch");
  const double keep = std::exp(-t);
  const double mix = 1.0 - keep;
  HypercubeFunction out = f;
  for (int k = 1; k <= f.dim(); ++k) {
    const std::uint32_t bit = 1u << (k - 1);
    const double pk = law.p(k), qk = law.q(k);
    for (std::uint32_t m = 0; m < out.atoms(); ++m) {
      if (m & bit) continue;
      const double fm = out[m];
      const double fp = out[m | bit];
      const double mean = pk * fp + qk * fm;
      out[m] = keep * fm + mix * mean;
      out[m | bit] = keep * fp + mix * mean;
    }
  }
  return out;
}

double mehler_check(const HypercubeFunction& f, double t, const RademacherLaw& law) {
  const HypercubeFunction lhs = mehler_pt(f, t, law);
  const HypercubeFunction rhs =
      apply_Pt(walsh_decompose(f, law), t).to_hypercube(law, f.dim());
  double dev = 0.0;
  for (std::uint32_t m = 0; m < lhs.atoms(); ++m)
    dev = std::max(dev, std::abs(lhs[m] - rhs[m]));
  return dev;
}

ExchangeabilityReport exchangeability_check(const Kernel& f, double t,
                                            const RademacherLaw& law, double tol,
                                            int pair_cap) {
  const int n = law.dim();
  if (n > pair_cap)
    throw ResourceError("exchangeability_check: pair enumeration needs dim <= cap");
  const HypercubeFunction table = HypercubeFunction::from_kernel(f, law, pair_cap);

  // Distinct values of F, merged within a small tolerance.
  std::vector<double> values(table.values());
  std::sort(values.begin(), values.end());
  std::vector<double> uniq;
  for (double v : values)
    if (uniq.empty() || std::abs(v - uniq.back()) > 1e-12 * (1.0 + std::abs(v)))
      uniq.push_back(v);
  auto value_id = [&](double v) {
    auto it = std::lower_bound(uniq.begin(), uniq.end(), v);
    if (it == uniq.end()) return static_cast<int>(uniq.size()) - 1;
    if (it != uniq.begin() && v - *(it - 1) < *it - v) --it;
    return static_cast<int>(it - uniq.begin());
  };
  std::vector<int> id(table.atoms());
  for (std::uint32_t m = 0; m < table.atoms(); ++m) id[m] = value_id(table[m]);

  const double keep = std::exp(-t);
  const double mix = 1.0 - keep;
  // Per-coordinate transition weight P(X_k = a, X_k^t = b), written in the
  // generative (conditional) form so that symmetry is a consequence of the
  // construction, not of the code.
  auto coord_weight = [&](int k, bool a_plus, bool b_plus) {
    const double pa = a_plus ? law.p(k) : law.q(k);
    const double pb = b_plus ? law.p(k) : law.q(k);
    double w = mix * pb;
    if (a_plus == b_plus) w += keep;
    return pa * w;
  };

  const int nv = static_cast<int>(uniq.size());
  std::vector<double> joint(static_cast<std::size_t>(nv) * nv, 0.0);
  for (std::uint32_t x = 0; x < table.atoms(); ++x) {
    for (std::uint32_t z = 0; z < table.atoms(); ++z) {
      double w = 1.0;
      for (int k = 1; k <= n; ++k) {
        const std::uint32_t bit = 1u << (k - 1);
        w *= coord_weight(k, (x & bit) != 0, (z & bit) != 0);
      }
      joint[static_cast<std::size_t>(id[x]) * nv + id[z]] += w;
    }
  }

  ExchangeabilityReport rep;
  rep.distinct_values = nv;
  for (int a = 0; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b)
      rep.max_asymmetry =
          std::max(rep.max_asymmetry,
                   std::abs(joint[static_cast<std::size_t>(a) * nv + b] -
                            joint[static_cast<std::size_t>(b) * nv + a]));
  rep.pass = rep.max_asymmetry <= tol;
  return rep;
}

namespace {

// Polynomial extrapolation of (t_i, c_i) to t = 0 (Neville's scheme).
double extrapolate_to_zero(const std::vector<double>& t, std::vector<double> c) {
  const int n = static_cast<int>(t.size());
  for (int level = 1; level < n; ++level)
    for (int i = 0; i < n - level; ++i)
      c[i] = (t[i + level] * c[i] - t[i] * c[i + 1]) / (t[i + level] - t[i]);
  return c.empty() ? 0.0 : c[0];
}

}  // namespace

RegressionReport regression_check(const Kernel& f, const RademacherLaw& law,
                                  const std::vector<double>& t_grid, const Kernel* g,
                                  int exact_cap) {
  const int p = f.order();
  const Kernel& gk = g ? *g : f;
  const int q = gk.order();
  const HypercubeFunction F = HypercubeFunction::from_kernel(f, law, exact_cap);
  const HypercubeFunction G = g ? HypercubeFunction::from_kernel(gk, law, exact_cap) : F;
  const HypercubeFunction FG = F * G;
  const HypercubeFunction F2 = F * F;
  const ChaosDecomposition gamma_fg = carre_du_champ(f, gk, law, exact_cap);
  const HypercubeFunction gamma_fg_tab = gamma_fg.to_hypercube(law, exact_cap);
  const ChaosDecomposition gamma_ff =
      g ? carre_du_champ(f, f, law, exact_cap) : gamma_fg;
  const HypercubeFunction gamma_ff_tab =
      g ? gamma_ff.to_hypercube(law, exact_cap) : gamma_fg_tab;

  RegressionReport rep;
  const double ef4 = expect_exact(F2 * F2, law);
  rep.rho = -4.0 * p * ef4 + 12.0 * expect_exact(F2 * gamma_ff_tab, law);

  std::vector<double> ts, cs;
  for (double t : t_grid) {
    if (t <= 0.0) throw InputError("regression_check: grid times must be > 0");
    RegressionRow row;
    row.t = t;
    const HypercubeFunction ptF = mehler_pt(F, t, law);
    const HypercubeFunction ptG = g ? mehler_pt(G, t, law) : ptF;
    const HypercubeFunction ptFG = mehler_pt(FG, t, law);
    const HypercubeFunction ptF2 = g ? mehler_pt(F2, t, law) : ptFG;

    // (a) E[F_t - F | X]/t + pF
    HypercubeFunction ra = ptF;
    ra -= F;
    ra *= 1.0 / t;
    HypercubeFunction pf = F;
    pf *= static_cast<double>(p);
    ra += pf;
    row.dist_a = std::sqrt(std::max(0.0, expect_exact(ra * ra, law)));

    // (b) E[(F_t - F)(G_t - G) | X] = P_t(FG) - F P_t G - G P_t F + FG
    HypercubeFunction rb = ptFG;
    rb -= F * ptG;
    rb -= G * ptF;
    rb += FG;
    rb *= 1.0 / t;
    HypercubeFunction two_gamma = gamma_fg_tab;
    two_gamma *= 2.0;
    rb -= two_gamma;
    row.dist_b = std::sqrt(std::max(0.0, expect_exact(rb * rb, law)));

    // (c) E[(F_t - F)^4]/t via the exchangeability rearrangement
    //     4 E[F^3 E[F_t - F | X]] + 6 E[F^2 E[(F_t - F)^2 | X]].
    HypercubeFunction inc1 = ptF;
    inc1 -= F;
    HypercubeFunction inc2 = ptF2;
    inc2 -= F * ptF;
    inc2 -= F * ptF;
    inc2 += F2;
    const double term1 = expect_exact(F2 * F * inc1, law);
    const double term2 = expect_exact(F2 * inc2, law);
    row.c_value = (4.0 * term1 + 6.0 * term2) / t;

    ts.push_back(t);
    cs.push_back(row.c_value);
    rep.rows.push_back(row);
  }
  rep.c_extrapolated = extrapolate_to_zero(ts, cs);
  return rep;
}

}  // namespace rchaos
