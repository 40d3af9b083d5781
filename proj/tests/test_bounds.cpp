#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rchaos/bounds.hpp"
#include "rchaos/math.hpp"
#include "rchaos/sampling.hpp"
#include "rchaos/verify.hpp"

using namespace rchaos;

namespace {

Kernel e(int k, int dim) {
  Kernel h(1, dim);
  h.set({k}, 1.0);
  return h;
}

}  // namespace

TEST_CASE("gamma_p values") {
  CHECK(gamma_p(1) == doctest::Approx(2.0));
  CHECK(gamma_p(2) == doctest::Approx(72.0));
  CHECK(gamma_p(3) == doctest::Approx(3960.0));
  CHECK_THROWS_AS(gamma_p(0), InputError);
}

TEST_CASE("w1_atoms_vs_gaussian: closed forms and quadrature oracle") {
  // point mass at 0: E|Z| = sqrt(2/pi)
  AtomLaw point{{0.0}, {1.0}};
  CHECK(w1_atoms_vs_gaussian(point) == doctest::Approx(std::sqrt(2.0 / kPi)));

  // fair coin on {-1, +1}
  AtomLaw coin{{-1.0, 1.0}, {0.5, 0.5}};
  const double w1 = w1_atoms_vs_gaussian(coin);
  CHECK(w1 == doctest::Approx(oracle::w1_quadrature(coin)).epsilon(1e-7));

  // Monte Carlo cross-check within 3 standard errors
  const RademacherLaw sym1 = RademacherLaw::symmetric(1);
  const auto xs = sample_Q(e(1, 1), SamplerSpec::rademacher(sym1, 2024), 400000, 2);
  const W1Estimate mc = w1_mc_vs_gaussian(xs, 7);
  CHECK(std::abs(mc.value - w1) < 3.0 * std::max(mc.se, 1e-3));

  // a skewed three-atom law against the quadrature oracle
  AtomLaw tri{{-1.5, 0.25, 2.0}, {0.3, 0.45, 0.25}};
  CHECK(w1_atoms_vs_gaussian(tri) ==
        doctest::Approx(oracle::w1_quadrature(tri)).epsilon(1e-7));
}

TEST_CASE("wasserstein_exact equals the atom-law closed form") {
  const RademacherLaw sym = RademacherLaw::symmetric(6);
  const Kernel fn = make_counterexample_kernel(2, 6);
  const double w = wasserstein_exact(fn, sym);
  CHECK(w > 0.0);
  CHECK(w == doctest::Approx(oracle::w1_quadrature(atom_distribution(fn, sym)))
                 .epsilon(1e-6));
}

TEST_CASE("dw_bound_univariate") {
  // e_1, symmetric: kappa4 = -2, M = 1, gamma_1 = 2
  const RademacherLaw sym1 = RademacherLaw::symmetric(1);
  const BoundReport r = dw_bound_univariate(e(1, 1), sym1);
  CHECK(r.fourth_cumulant == doctest::Approx(-2.0));
  CHECK(r.influence == doctest::Approx(1.0));
  const double c1 = std::sqrt(2.0 / kPi) + 4.0 / 3.0;
  const double c2 = (std::sqrt(2.0 / kPi) + 2.0 * std::sqrt(6.0) / 3.0) * std::sqrt(2.0);
  CHECK(r.rhs == doctest::Approx(c1 * std::sqrt(2.0) + c2));
  CHECK(r.lhs <= r.rhs);
  CHECK(r.exact);

  // counterexample kernel: the influence term alone keeps rhs above C2/2
  const Kernel fn = make_counterexample_kernel(2, 10);
  const BoundReport rn = dw_bound_univariate(fn, RademacherLaw::symmetric(10));
  CHECK(rn.influence == doctest::Approx(0.25));
  const double c2q2 =
      (std::sqrt(2.0 / kPi) + 2.0 * std::sqrt(6.0) / 3.0) * std::sqrt(gamma_p(2));
  CHECK(rn.rhs >= c2q2 * 0.5 - 1e-12);
  CHECK(rn.lhs <= rn.rhs);

  // the bound structure: zero cumulant and zero influence give rhs = 0
  BoundReport synth;
  synth.fourth_cumulant = 0.0;
  synth.influence = 0.0;
  CHECK(c1 * std::sqrt(std::abs(synth.fourth_cumulant)) +
            c2 * std::sqrt(synth.influence) ==
        doctest::Approx(0.0));

  // normalisation is enforced
  Kernel not_norm(1, 2);
  not_norm.set({1}, 2.0);
  CHECK_THROWS_AS(dw_bound_univariate(not_norm, RademacherLaw::symmetric(2)),
                  InputError);
}

TEST_CASE("first_chaos_exact") {
  // h = e_1, symmetric law
  const FirstChaosReport r1 = first_chaos_exact(e(1, 1), RademacherLaw::symmetric(1));
  CHECK(r1.fourth_moment_formula == doctest::Approx(1.0));
  REQUIRE(r1.fourth_moment_enum.has_value());
  CHECK(*r1.fourth_moment_enum == doctest::Approx(1.0));
  CHECK(r1.dw_bound == doctest::Approx(2.0));
  CHECK(r1.kol_bound == doctest::Approx(4.0));

  // uniform h over m coordinates: kappa4 = -2/m, dw bound = 2/sqrt(m)
  for (int m : {4, 9}) {
    const FirstChaosReport r = first_chaos_exact(make_uniform_first_order(m),
                                                 RademacherLaw::symmetric(m));
    CHECK(r.fourth_moment_formula - 3.0 == doctest::Approx(-2.0 / m));
    CHECK(r.dw_bound == doctest::Approx(2.0 / std::sqrt(static_cast<double>(m))));
  }

  // homogeneous biased law: formula matches enumeration, coefficient has the
  // squared exponent
  CounterRng rng = CounterRng::stream(31, 40);
  const int n = 6;
  for (double p : {0.2, 0.35, 0.62}) {
    const RademacherLaw law(std::vector<double>(n, p));
    const Kernel h = random_sparse_kernel(1, n, n, rng, true);
    const FirstChaosReport r = first_chaos_exact(h, law);
    REQUIRE(r.fourth_moment_enum.has_value());
    CHECK(r.fourth_moment_formula ==
          doctest::Approx(*r.fourth_moment_enum).epsilon(1e-10));
    CHECK(r.homogeneous);
    const double q = 1.0 - p;
    CHECK(r.coefficient == doctest::Approx((p * p + q * q - 4 * p * q) / (p * q)));
    CHECK(r.exact_fm_applicable);
    // exact fourth-moment bound dominates the direct sum bound
    CHECK(r.exact_fm_dw ==
          doctest::Approx(std::sqrt((r.fourth_moment_formula - 3.0) /
                                    (p * p + q * q - 4 * p * q)))
              .epsilon(1e-10));
  }

  // the exclusion set p = 1/2 +- 1/(2 sqrt(3)) makes the bound inapplicable
  const double p_excl = 0.5 + 0.5 / std::sqrt(3.0);
  const RademacherLaw excl(std::vector<double>(4, p_excl));
  const FirstChaosReport r_excl =
      first_chaos_exact(make_uniform_first_order(4), excl);
  CHECK(!r_excl.exact_fm_applicable);

  // random biased laws: formula matches enumeration
  for (int trial = 0; trial < 5; ++trial) {
    const RademacherLaw law = random_biased_law(n, rng);
    const Kernel h = random_sparse_kernel(1, n, n, rng, true);
    const FirstChaosReport r = first_chaos_exact(h, law);
    CHECK(r.fourth_moment_formula ==
          doctest::Approx(*r.fourth_moment_enum).epsilon(1e-10));
  }
}

TEST_CASE("lemma_tech1_sides: equality case and random trials") {
  // f = g = e_1, symmetric: F^2 = 1, all J_k vanish; (lem-2) holds with
  // equality: 0 <= (1 - 3) + (2p)! ||f(x)~f 1_{Dc}||^2 = -2 + 2 = 0.
  const RademacherLaw sym = RademacherLaw::symmetric(2);
  const Tech1Report t0 = lemma_tech1_sides(e(1, 2), e(1, 2), sym);
  CHECK(t0.lem2_lhs_var == doctest::Approx(0.0));
  CHECK(factorial(2) * t0.leak_ff == doctest::Approx(2.0));
  CHECK(t0.lem2_rhs == doctest::Approx(0.0));
  CHECK(t0.uni_lhs == doctest::Approx(t0.uni_rhs).epsilon(1e-12));

  // order-1 disjoint supports: the leak reduces to a direct sum
  const Tech1Report td =
      lemma_tech1_sides(e(1, 3), e(2, 3), RademacherLaw::symmetric(3));
  CHECK(td.leak_fg == doctest::Approx(0.0));
  CHECK(td.lem3_rhs >= td.lem3_lhs);

  CounterRng rng = CounterRng::stream(41, 41);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 8;
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : random_biased_law(n, rng);
    const Kernel f = random_sparse_kernel(2, n, 6, rng, true);
    const Kernel g = random_sparse_kernel(1 + static_cast<int>(rng.next_below(2)), n,
                                          6, rng, true);
    const Tech1Report t = lemma_tech1_sides(f, g, law);
    CHECK(t.lem1_lhs <= t.lem1_rhs + 1e-10);
    CHECK(t.lem2_lhs_var <= t.lem2_rhs + 1e-10);
    CHECK(t.lem2_lhs_contr <= t.lem2_rhs + 1e-10);
    CHECK(t.lem3_lhs <= t.lem3_rhs + 1e-10);
    CHECK(t.uni_lhs == doctest::Approx(t.uni_rhs).epsilon(1e-10));
  }
}

TEST_CASE("use_bounds: equality at e_1 and random trials") {
  const RademacherLaw sym = RademacherLaw::symmetric(1);
  const UseBoundsReport u0 = use_bounds(e(1, 1), sym);
  CHECK(u0.var_gamma_over_p == doctest::Approx(0.0));
  CHECK(u0.use1_rhs == doctest::Approx(0.0));  // (1-3) + 2*1*1
  CHECK(u0.use2_lhs == doctest::Approx(2.0));
  CHECK(u0.use2_rhs == doctest::Approx(2.0));  // equality
  CHECK(u0.rho == doctest::Approx(8.0));

  CounterRng rng = CounterRng::stream(43, 42);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 8;
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : random_biased_law(n, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const UseBoundsReport u = use_bounds(f, law);
    CHECK(u.var_gamma_over_p <= u.use1_rhs + 1e-10);
    CHECK(u.use2_lhs <= u.use2_rhs + 1e-10);
    CHECK(u.rho >= -1e-10);
  }
}

TEST_CASE("use_bounds rho agrees with the regression limit") {
  CounterRng rng = CounterRng::stream(45, 43);
  const int n = 6;
  const RademacherLaw law = random_biased_law(n, rng);
  const Kernel f = random_sparse_kernel(2, n, 5, rng, true);
  const UseBoundsReport u = use_bounds(f, law);
  const RegressionReport r = regression_check(f, law, {1e-2, 1e-3, 1e-4});
  CHECK(u.rho == doctest::Approx(r.rho).epsilon(1e-10));
}

TEST_CASE("covariance_matrix") {
  const RademacherLaw sym = RademacherLaw::symmetric(6);
  CounterRng rng = CounterRng::stream(47, 44);
  const Kernel h = random_sparse_kernel(1, 6, 5, rng, true);
  const Kernel f = random_sparse_kernel(2, 6, 5, rng, true);

  // cross-order entries vanish by orthogonality
  const CovarianceReport r = covariance_matrix({h, f}, sym);
  CHECK(r.formula[0][1] == 0.0);
  CHECK(r.formula[1][0] == 0.0);
  CHECK(r.formula[0][0] == doctest::Approx(1.0));
  CHECK(r.formula[1][1] == doctest::Approx(1.0));
  REQUIRE(r.enumeration.has_value());
  CHECK(r.max_deviation < 1e-10);

  // equal-order random pair: q! <f,g> matches enumeration
  const Kernel g = random_sparse_kernel(2, 6, 5, rng, true);
  CHECK(covariance_matrix({f, g}, sym).max_deviation < 1e-10);
}

TEST_CASE("multivariate_bound: d = 1 closed form") {
  MultivariateInput in;
  in.kernels = {e(1, 1)};
  in.law = RademacherLaw::symmetric(1);
  const MultivariateReport r = multivariate_bound(in);
  // S = 2 Gamma - 2 = 0, rho = 8, trace term = 2
  CHECK(r.e_s_norm == doctest::Approx(0.0));
  CHECK(r.rho[0] == doctest::Approx(8.0));
  CHECK(r.term1 == doctest::Approx(0.0));
  CHECK(r.term2 == doctest::Approx(std::sqrt(2.0) * std::sqrt(8.0) / 18.0));
  CHECK(r.rhs == doctest::Approx(4.0 / 18.0));
}

TEST_CASE("multivariate_bound: independent coordinates give S = 0, rho_i = 8") {
  MultivariateInput in;
  in.kernels = {e(1, 2), e(2, 2)};
  in.law = RademacherLaw::symmetric(2);
  Matrix id{{1.0, 0.0}, {0.0, 1.0}};
  in.target_cov = id;
  const MultivariateReport r = multivariate_bound(in);
  CHECK(r.e_s_norm == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.rho[0] == doctest::Approx(8.0));
  CHECK(r.rho[1] == doctest::Approx(8.0));
  CHECK(r.term1 == doctest::Approx(0.0));

  // all S_ij = 0 and all rho_i = 0 force a zero bound
  MultivariateReport zero = r;
  CHECK(r.lambda_inv_op * std::sqrt(2.0) * in.m2 / 4.0 * 0.0 +
            std::sqrt(2.0) * in.m3 * r.lambda_inv_op / 18.0 *
                std::sqrt(r.trace_term) * 0.0 ==
        doctest::Approx(0.0));
}

TEST_CASE("multivariate_bound: kernel route matches enumeration route") {
  // Same input evaluated exactly (within cap) and via the symmetric-case
  // kernel expansion with Monte Carlo E[sqrt(sum S^2)].
  const int n = 10;
  MultivariateInput in;
  in.kernels = {make_uniform_first_order(n), make_matching_kernel(n)};
  in.law = RademacherLaw::symmetric(n);

  MultivariateOptions exact_opt;
  const MultivariateReport ex = multivariate_bound(in, exact_opt);

  MultivariateOptions mc_opt;
  mc_opt.exact_cap = 4;  // force the kernel + Monte Carlo route
  mc_opt.mc_samples = 200000;
  mc_opt.seed = 99;
  const MultivariateReport mc = multivariate_bound(in, mc_opt);

  CHECK(ex.rho[0] == doctest::Approx(mc.rho[0]).epsilon(1e-9));
  CHECK(ex.rho[1] == doctest::Approx(mc.rho[1]).epsilon(1e-9));
  CHECK(ex.trace_term == doctest::Approx(mc.trace_term).epsilon(1e-9));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(ex.var_gamma[i][j] == doctest::Approx(mc.var_gamma[i][j]).epsilon(1e-9));
  CHECK(std::abs(ex.e_s_norm - mc.e_s_norm) < 3.0 * std::max(mc.e_s_norm_se, 1e-4));
  CHECK(!mc.exact);
}

TEST_CASE("step2_covariance_terms") {
  const RademacherLaw sym = RademacherLaw::symmetric(8);
  CounterRng rng = CounterRng::stream(49, 45);

  // f = g: the identity reduces to the (uni) quantities
  {
    const Kernel f = random_sparse_kernel(2, 8, 5, rng, true);
    const Step2Report s = step2_covariance_terms(f, f, sym);
    REQUIRE(s.equal_orders);
    CHECK(s.identity_sum == doctest::Approx(s.identity_exact).epsilon(1e-10));
    CHECK(std::abs(s.term1) <= s.term1_bound + 1e-10);
    CHECK(std::abs(s.term2) <= s.term2_bound + 1e-10);
    CHECK(std::abs(s.term3) <= s.term3_bound + 1e-10);
  }

  // disjoint equal-order supports: E[FG] = 0 and the mixed contractions vanish
  {
    Kernel f(2, 8), g(2, 8);
    f.set({1, 2}, 1.0);
    f.set({3, 4}, -0.5);
    g.set({5, 6}, 0.8);
    g.set({7, 8}, 0.6);
    const Step2Report s = step2_covariance_terms(normalize_variance(f),
                                                 normalize_variance(g), sym);
    CHECK(s.term2 == doctest::Approx(0.0));
    CHECK(s.identity_sum == doctest::Approx(s.identity_exact).epsilon(1e-10));
  }

  // p < q: the cross-order Cauchy-Schwarz bound
  for (int trial = 0; trial < 4; ++trial) {
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(8) : random_biased_law(8, rng);
    const Kernel f = random_sparse_kernel(1, 8, 5, rng, true);
    const Kernel g = random_sparse_kernel(2, 8, 5, rng, true);
    const Step2Report s = step2_covariance_terms(f, g, law);
    REQUIRE(!s.equal_orders);
    CHECK(s.cov_abs <= s.cov_bound + 1e-10);
  }

  // random equal-order trials, both laws
  for (int trial = 0; trial < 6; ++trial) {
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(8) : random_biased_law(8, rng);
    const int p = 2 + static_cast<int>(rng.next_below(2));
    const Kernel f = random_sparse_kernel(p, 8, 5, rng, true);
    const Kernel g = random_sparse_kernel(p, 8, 5, rng, true);
    const Step2Report s = step2_covariance_terms(f, g, law);
    CHECK(s.identity_sum == doctest::Approx(s.identity_exact).epsilon(1e-10));
    CHECK(std::abs(s.term1) <= s.term1_bound + 1e-10);
    CHECK(std::abs(s.term2) <= s.term2_bound + 1e-10);
    CHECK(std::abs(s.term3) <= s.term3_bound + 1e-10);
  }
}

TEST_CASE("theorem end-to-end: W1 below the fourth-moment-influence bound") {
  CounterRng rng = CounterRng::stream(51, 46);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 8;
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : random_biased_law(n, rng);
    const int p = 2 + static_cast<int>(rng.next_below(2));
    const Kernel f = random_sparse_kernel(p, n, 6, rng, true);
    const BoundReport r = dw_bound_univariate(f, law);
    CHECK(r.lhs <= r.rhs + 1e-10);
  }
}
