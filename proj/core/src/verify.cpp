#include "rchaos/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rchaos/bounds.hpp"
#include "rchaos/chaos.hpp"
#include "rchaos/hypercube.hpp"
#include "rchaos/math.hpp"
#include "rchaos/ou.hpp"
#include "rchaos/sampling.hpp"

namespace rchaos {

bool SuiteResult::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

int SuiteResult::failures() const {
  int n = 0;
  for (const auto& r : rows)
    if (!r.pass) ++n;
  return n;
}

RademacherLaw random_biased_law(int dim, CounterRng& rng, double lo, double hi) {
  std::vector<double> p(dim);
  for (double& pk : p) pk = rng.next_range(lo, hi);
  return RademacherLaw(std::move(p));
}

namespace {

class Recorder {
 public:
  Recorder(SuiteResult& out, std::string suite) : out_(out), suite_(std::move(suite)) {}

  void record(const std::string& check, long trial, double deviation,
              double tolerance) {
    out_.rows.push_back(
        {suite_, check, trial, deviation, tolerance, deviation <= tolerance, "exact"});
  }

  void record_mc(const std::string& check, long trial, double deviation,
                 double tolerance, double se) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "mc(se=%.6g)", se);
    out_.rows.push_back(
        {suite_, check, trial, deviation, tolerance, deviation <= tolerance, buf});
  }

  /// For one-sided inequalities lhs <= rhs + tol: deviation = max(0, lhs-rhs).
  void record_le(const std::string& check, long trial, double lhs, double rhs,
                 double tolerance) {
    record(check, trial, std::max(0.0, lhs - rhs), tolerance);
  }

 private:
  SuiteResult& out_;
  std::string suite_;
};

RademacherLaw pick_law(int dim, bool biased, CounterRng& rng) {
  return biased ? random_biased_law(dim, rng) : RademacherLaw::symmetric(dim);
}

void suite_algebra(SuiteResult& out, std::uint64_t seed) {
  Recorder rec(out, "algebra");
  CounterRng rng = CounterRng::stream(seed, 0xA16Eull);
  const double tol = 1e-10;
  for (long trial = 0; trial < 40; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(5));  // 6..10
    const int p = 1 + static_cast<int>(rng.next_below(4));  // 1..4
    const int q = 1 + static_cast<int>(rng.next_below(std::min(p, 3)));
    Kernel f = random_sparse_kernel(p, n, 6, rng, true);
    Kernel g = random_sparse_kernel(q, n, 6, rng, true);

    // symmetrisation is a projection and contracts norms
    RawTable tp = contract(f, g, std::min(p, q) >= 1 ? 1 : 0);
    RawTable sym1 = symmetrize(tp);
    RawTable sym2 = symmetrize(sym1);
    double dev = 0.0;
    for (const auto& [k, v] : sym1.entries())
      dev = std::max(dev, std::abs(v - sym2.value_at(k)));
    rec.record("symmetrize_idempotent", trial, dev, 1e-12);
    rec.record_le("symmetrize_contracts_norm", trial, norm_sq(sym1), norm_sq(tp),
                  1e-12);

    // contraction-norm identity: ||f x_r g||^2 = <f x_{q-r} f, g x_{q-r} g>
    if (p == q) {
      for (int r = 0; r <= q; ++r) {
        const double lhs = norm_sq(contract(f, g, r));
        const double rhs = inner(contract(f, f, q - r), contract(g, g, q - r));
        rec.record("contraction_norm_identity", trial, std::abs(lhs - rhs), tol);
      }
    }

    // squared-norm expansion of the symmetrised tensor product
    {
      double rhs = 0.0;
      for (int r = 0; r <= std::min(p, q); ++r)
        rhs += factorial(p) * factorial(q) * binomial(p, r) * binomial(q, r) *
               norm_sq(contract(f, g, r));
      const double lhs = factorial(p + q) * sym_tensor_norm_sq(f, g);
      rec.record("sym_tensor_norm_expansion", trial, std::abs(lhs - rhs),
                 tol * std::max(1.0, std::abs(lhs)));
    }

    // influence dominance: M(f) <= ||f x_{d-1} f||
    rec.record_le("influence_dominance", trial, max_influence(f),
                  std::sqrt(norm_sq(contract(f, f, p - 1))), tol);

    // off-diagonal leak bound (lem-3)
    {
      const double lhs = sym_tensor_offdiag_norm_sq(f, g);
      double rhs = 0.0;
      const double cap = std::min(norm_sq(f) * max_influence(g),
                                  norm_sq(g) * max_influence(f));
      for (int r = 1; r <= std::min(p, q); ++r)
        rhs += factorial(r) * binomial(p, r) * binomial(q, r) * cap;
      rec.record_le("offdiag_leak_bound", trial, lhs, rhs, tol);
    }
  }

  // counterexample kernel facts
  for (int q = 2; q <= 4; ++q) {
    const int n = q + 6;
    const Kernel f = make_counterexample_kernel(q, n);
    rec.record("counterexample_normalization", q,
               std::abs(factorial(q) * norm_sq(f) - 1.0), 1e-12);
    rec.record("counterexample_influence", q,
               std::abs(max_influence(f) - 1.0 / (q * factorial(q))), 1e-12);
  }
}

void suite_chaos(SuiteResult& out, std::uint64_t seed) {
  Recorder rec(out, "chaos");
  CounterRng rng = CounterRng::stream(seed, 0xC4A05ull);
  for (long trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_below(4));  // 5..8
    const bool biased = trial % 2 == 1;
    const RademacherLaw law = pick_law(n, biased, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const Kernel g = random_sparse_kernel(q, n, 5, rng, true);

    // reconstruction of a random multilinear function
    HypercubeFunction F(n, 0.0);
    for (std::uint32_t m = 0; m < F.atoms(); ++m) F[m] = rng.next_range(-1.0, 1.0);
    const ChaosDecomposition d = walsh_decompose(F, law);
    const HypercubeFunction back = d.to_hypercube(law, n);
    double dev = 0.0;
    for (std::uint32_t m = 0; m < F.atoms(); ++m)
      dev = std::max(dev, std::abs(F[m] - back[m]));
    rec.record("walsh_reconstruction", trial, dev, 1e-9);

    // orthogonality: E[Q_p(f) Q_q(g)] = 1{p=q} p! <f,g>
    const HypercubeFunction tf = HypercubeFunction::from_kernel(f, law, n);
    const HypercubeFunction tg = HypercubeFunction::from_kernel(g, law, n);
    const double lhs = expect_exact(tf * tg, law);
    const double rhs = p == q ? factorial(p) * inner(f, g) : 0.0;
    rec.record("orthogonality", trial, std::abs(lhs - rhs), 1e-10);

    // Walsh decomposition of Q_p(f) returns exactly {constant 0, h_p = f}
    const ChaosDecomposition df = walsh_decompose(tf, law);
    double id_dev = std::abs(df.constant);
    for (const auto& [k, h] : df.kernels) {
      if (k == p)
        id_dev = std::max(id_dev, max_coeff_deviation(h, f));
      else
        for (const auto& [key, v] : h.entries())
          id_dev = std::max(id_dev, std::abs(v));
    }
    rec.record("walsh_of_Q_is_kernel", trial, id_dev, 1e-10);

    // gradient commutation on two random coordinates
    const int k1 = 1 + static_cast<int>(rng.next_below(n));
    int k2 = 1 + static_cast<int>(rng.next_below(n));
    if (k2 == k1) k2 = 1 + (k2 % n);
    const HypercubeFunction d12 =
        discrete_gradient(discrete_gradient(F, k1, law), k2, law);
    const HypercubeFunction d21 =
        discrete_gradient(discrete_gradient(F, k2, law), k1, law);
    double gdev = 0.0;
    for (std::uint32_t m = 0; m < F.atoms(); ++m)
      gdev = std::max(gdev, std::abs(d12[m] - d21[m]));
    rec.record("gradient_commutation", trial, gdev, 1e-12);

    // multiplication formula vs Walsh route (symmetric law only)
    if (!biased) {
      const ChaosDecomposition via_formula = multiply_symmetric(f, g);
      const ChaosDecomposition via_walsh = walsh_decompose(tf * tg, law);
      double mdev = std::abs(via_formula.constant - via_walsh.constant);
      for (int k = 1; k <= p + q; ++k) {
        const Kernel* a = via_formula.find(k);
        const Kernel* b = via_walsh.find(k);
        if (!a && !b) continue;
        Kernel zero(k, n);
        mdev = std::max(mdev, max_coeff_deviation(a ? *a : zero, b ? *b : zero));
      }
      rec.record("multiplication_formula", trial, mdev, 1e-10);
    }

    // top-kernel lemma under any law
    const ProductCheckReport pr = product_top_kernel_check(f, g, law);
    rec.record("product_top_kernel", trial,
               std::max(pr.top_kernel_deviation, pr.above_order_mass), 1e-10);
  }
}

void suite_coupling(SuiteResult& out, std::uint64_t seed) {
  Recorder rec(out, "coupling");
  CounterRng rng = CounterRng::stream(seed, 0xC0D3ull);
  const std::vector<double> ts = {0.1, 0.5, 1.0};
  for (long trial = 0; trial < 12; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_below(3));  // 5..7
    const bool biased = trial % 2 == 1;
    const RademacherLaw law = pick_law(n, biased, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const Kernel g = random_sparse_kernel(q, n, 5, rng, true);
    const HypercubeFunction F = HypercubeFunction::from_kernel(f, law, n);
    const HypercubeFunction G = HypercubeFunction::from_kernel(g, law, n);

    for (double t : ts)
      rec.record("mehler", trial, mehler_check(F, t, law), 1e-10);

    // semigroup property on coefficients
    const ChaosDecomposition d = walsh_decompose(F * G, law);
    const ChaosDecomposition ab = apply_Pt(apply_Pt(d, 0.3), 0.45);
    const ChaosDecomposition once = apply_Pt(d, 0.75);
    double sdev = 0.0;
    for (const auto& [k, h] : ab.kernels) {
      const Kernel* o = once.find(k);
      if (o) sdev = std::max(sdev, max_coeff_deviation(h, *o));
    }
    rec.record("semigroup", trial, sdev, 1e-12);

    // spectral consistency: Gamma = (L(FG) - F LG - G LF)/2 pointwise
    const ChaosDecomposition gamma = carre_du_champ(f, g, law, n);
    const HypercubeFunction gamma_tab = gamma.to_hypercube(law, n);
    const HypercubeFunction lfg = apply_L(d).to_hypercube(law, n);
    double cdev = 0.0;
    for (std::uint32_t m = 0; m < F.atoms(); ++m) {
      const double direct =
          0.5 * (lfg[m] - F[m] * (-q * G[m]) - G[m] * (-p * F[m]));
      cdev = std::max(cdev, std::abs(gamma_tab[m] - direct));
    }
    rec.record("spectral_consistency", trial, cdev, 1e-10);

    // E[Gamma(F,F)] = p E[F^2]
    const ChaosDecomposition gff = carre_du_champ(f, f, law, n);
    rec.record("gamma_mean", trial,
               std::abs(gff.constant - p * expect_exact(F * F, law)), 1e-10);

    // var_gamma exact <= bound
    const VarGamma vg = var_gamma(f, g, law, n);
    rec.record_le("var_gamma_bound", trial, vg.exact, vg.bound, 1e-12);

    // exchangeability of (F, F_t)
    const ExchangeabilityReport ex = exchangeability_check(f, 0.5, law, 1e-12, n);
    rec.record("exchangeability", trial, ex.max_asymmetry, 1e-12);
  }

  // regression rates on a decade grid
  for (long trial = 0; trial < 6; ++trial) {
    const int n = 6;
    const RademacherLaw law = pick_law(n, trial % 2 == 1, rng);
    const int p = 2 + static_cast<int>(rng.next_below(2));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const RegressionReport rr = regression_check(f, law, {1e-2, 1e-3, 1e-4});
    for (std::size_t i = 0; i + 1 < rr.rows.size(); ++i) {
      const double ra = rr.rows[i].dist_a / rr.rows[i + 1].dist_a;
      const double rb = rr.rows[i].dist_b / rr.rows[i + 1].dist_b;
      rec.record("regression_rate_a", trial, std::abs(ra - 10.0), 2.0);
      rec.record("regression_rate_b", trial, std::abs(rb - 10.0), 2.0);
    }
    const double rel =
        std::abs(rr.c_extrapolated - rr.rho) / std::max(1e-12, std::abs(rr.rho));
    rec.record("regression_c_limit", trial, rel, 1e-4);
    rec.record_le("rho_nonnegative", trial, 0.0, rr.rho, 1e-10);
  }

  // marginal preservation of the coupling (Monte Carlo)
  {
    const int n = 4;
    CounterRng lrng = CounterRng::stream(seed, 0x11AAull);
    const RademacherLaw law = random_biased_law(n, lrng);
    const double t = 0.7;
    const long samples = 200000;
    std::vector<long> plus(n, 0);
    for (long i = 0; i < samples; ++i) {
      std::uint32_t x = 0;
      CounterRng xr = CounterRng::stream(seed, 0x22BBull, static_cast<std::uint64_t>(i));
      for (int k = 1; k <= n; ++k)
        if (xr.next_unit() < law.p(k)) x |= 1u << (k - 1);
      const std::uint32_t z = couple_sample(x, t, law, seed ^ 0x33CCull, i);
      for (int k = 1; k <= n; ++k)
        if (z & (1u << (k - 1))) ++plus[k - 1];
    }
    for (int k = 1; k <= n; ++k) {
      const double phat = static_cast<double>(plus[k - 1]) / samples;
      const double se = std::sqrt(law.p(k) * law.q(k) / samples);
      rec.record_mc("coupling_marginal", k, std::abs(phat - law.p(k)), 3.0 * se, se);
    }
  }
}

void suite_bounds(SuiteResult& out, std::uint64_t seed) {
  Recorder rec(out, "bounds");
  CounterRng rng = CounterRng::stream(seed, 0xB0D5ull);
  for (long trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(3));  // 6..8
    const bool biased = trial % 2 == 1;
    const RademacherLaw law = pick_law(n, biased, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const Kernel g = random_sparse_kernel(q, n, 5, rng, true);

    const Tech1Report t1 = lemma_tech1_sides(f, g, law, n);
    rec.record_le("lem1", trial, t1.lem1_lhs, t1.lem1_rhs, 1e-10);
    rec.record_le("lem2_var", trial, t1.lem2_lhs_var, t1.lem2_rhs, 1e-10);
    rec.record_le("lem2_contr", trial, t1.lem2_lhs_contr, t1.lem2_rhs, 1e-10);
    rec.record_le("lem3", trial, t1.lem3_lhs, t1.lem3_rhs, 1e-10);
    rec.record("uni_identity", trial, std::abs(t1.uni_lhs - t1.uni_rhs), 1e-10);

    const UseBoundsReport ub = use_bounds(f, law, n);
    rec.record_le("use1", trial, ub.var_gamma_over_p, ub.use1_rhs, 1e-10);
    rec.record_le("use2", trial, ub.use2_lhs, ub.use2_rhs, 1e-10);
    rec.record_le("rho_nonnegative", trial, 0.0, ub.rho, 1e-10);

    const Step2Report s2 = step2_covariance_terms(f, g, law, n);
    if (s2.equal_orders) {
      rec.record("step2_identity", trial,
                 std::abs(s2.identity_exact - s2.identity_sum), 1e-10);
      rec.record_le("step2_term1", trial, std::abs(s2.term1), s2.term1_bound, 1e-10);
      rec.record_le("step2_term2", trial, std::abs(s2.term2), s2.term2_bound, 1e-10);
      rec.record_le("step2_term3", trial, std::abs(s2.term3), s2.term3_bound, 1e-10);
    } else {
      rec.record_le("step2_cross_order", trial, s2.cov_abs, s2.cov_bound, 1e-10);
    }

    // Wasserstein fourth-moment-influence bound, orders 2..3
    if (p >= 2) {
      const BoundReport br = dw_bound_univariate(f, law, {.exact_cap = n});
      rec.record_le("dw_theorem", trial, br.lhs, br.rhs, 1e-10);
    }

    // first-chaos formulas vs enumeration
    const Kernel h = random_sparse_kernel(1, n, n, rng, true);
    const FirstChaosReport fc = first_chaos_exact(h, law, n);
    rec.record("first_chaos_fourth_moment", trial,
               std::abs(fc.fourth_moment_formula - *fc.fourth_moment_enum), 1e-10);

    // covariance matrix: formula vs enumeration
    const CovarianceReport cov = covariance_matrix({f, g}, law, n);
    rec.record("covariance_modes", trial, cov.max_deviation, 1e-10);
  }
}

}  // namespace

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  SuiteResult out;
  if (name == "algebra" || name == "all") suite_algebra(out, seed);
  if (name == "chaos" || name == "all") suite_chaos(out, seed);
  if (name == "coupling" || name == "all") suite_coupling(out, seed);
  if (name == "bounds" || name == "all") suite_bounds(out, seed);
  if (out.rows.empty() && name != "all")
    throw InputError("run_suite: unknown suite '" + name +
                     "' (expected algebra|chaos|coupling|bounds|all)");
  return out;
}

}  // namespace rchaos
