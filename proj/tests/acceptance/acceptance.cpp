// Acceptance suite: eight scripted criteria, one pass/fail line each.
// Exact small-N checks carry hard tolerances; Monte Carlo demonstrations use
// 3-standard-error gates. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rchaos/bounds.hpp"
#include "rchaos/chaos.hpp"
#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"
#include "rchaos/math.hpp"
#include "rchaos/ou.hpp"
#include "rchaos/sampling.hpp"
#include "rchaos/verify.hpp"

using namespace rchaos;

namespace {

constexpr std::uint64_t kSeed = 20250809;
constexpr int kThreads = 2;

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++g_failures;
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id,
              detail.c_str(), seconds);
  std::fflush(stdout);
}

RademacherLaw biased_law(int dim, CounterRng& rng) {
  return random_biased_law(dim, rng, 0.1, 0.9);
}

double decomposition_deviation(const ChaosDecomposition& a,
                               const ChaosDecomposition& b, int max_order, int dim) {
  double dev = std::abs(a.constant - b.constant);
  for (int k = 1; k <= max_order; ++k) {
    const Kernel* ka = a.find(k);
    const Kernel* kb = b.find(k);
    if (!ka && !kb) continue;
    Kernel zero(k, dim);
    dev = std::max(dev, max_coeff_deviation(ka ? *ka : zero, kb ? *kb : zero));
  }
  return dev;
}

// 1. multiplication formula vs Walsh route, 200 symmetric-law pairs
void criterion1() {
  Timer timer;
  CounterRng rng = CounterRng::stream(kSeed, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(5));  // 6..10
    const RademacherLaw law = RademacherLaw::symmetric(n);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 4 + static_cast<int>(rng.next_below(7)),
                                          rng, true);
    const Kernel g = random_sparse_kernel(q, n, 4 + static_cast<int>(rng.next_below(7)),
                                          rng, true);
    const ChaosDecomposition lhs = multiply_symmetric(f, g);
    const ChaosDecomposition rhs = walsh_decompose(
        HypercubeFunction::from_kernel(f, law) * HypercubeFunction::from_kernel(g, law),
        law);
    worst = std::max(worst, decomposition_deviation(lhs, rhs, p + q, n));
  }
  const double secs = timer.seconds();
  const bool pass = worst <= 1e-10 && secs <= 60.0;
  report(1, pass,
         "multiplication formula == Walsh route on 200 pairs, max deviation " +
             std::to_string(worst),
         secs);
}

// 2. finite product decomposition under general laws + first-chaos kernel
void criterion2() {
  Timer timer;
  CounterRng rng = CounterRng::stream(kSeed, 2);
  double worst_top = 0.0, worst_above = 0.0, worst_w = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(5));
    const RademacherLaw law = biased_law(n, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const Kernel g = random_sparse_kernel(q, n, 5, rng, true);
    const ProductCheckReport rep = product_top_kernel_check(f, g, law);
    worst_top = std::max(worst_top, rep.top_kernel_deviation);
    worst_above = std::max(worst_above, rep.above_order_mass);

    // first-chaos special case: h_1 of Q_1(h)^2 is w(k) = h^2 (q-p)/sqrt(pq)
    const Kernel h = random_sparse_kernel(1, n, n, rng, true);
    const HypercubeFunction ht = HypercubeFunction::from_kernel(h, law);
    const ChaosDecomposition d = walsh_decompose(ht * ht, law);
    for (int k = 1; k <= n; ++k) {
      const double hk = h.coeff({k});
      const double want =
          hk * hk * (law.q(k) - law.p(k)) / std::sqrt(law.p(k) * law.q(k));
      const double got = d.find(1) ? d.find(1)->coeff({k}) : 0.0;
      worst_w = std::max(worst_w, std::abs(got - want));
    }
  }
  const bool pass = worst_top <= 1e-10 && worst_above <= 1e-10 && worst_w <= 1e-10;
  report(2, pass,
         "product truncates at p+q with top kernel f(x)~g|offdiag (dev " +
             std::to_string(std::max(worst_top, worst_above)) +
             "), first-chaos w dev " + std::to_string(worst_w),
         timer.seconds());
}

// 3. coupling: Mehler identity, exchangeability, flip frequencies
void criterion3() {
  Timer timer;
  CounterRng rng = CounterRng::stream(kSeed, 3);
  const std::vector<double> ts{0.1, 0.5, 1.0};
  double worst_mehler = 0.0, worst_asym = 0.0, worst_flip_z = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_below(4));  // 5..8
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : biased_law(n, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const HypercubeFunction F = HypercubeFunction::from_kernel(f, law);
    for (double t : ts) {
      worst_mehler = std::max(worst_mehler, mehler_check(F, t, law));
      worst_asym =
          std::max(worst_asym, exchangeability_check(f, t, law, 1e-12, n).max_asymmetry);
    }
  }
  // flip frequencies at one biased law, 10^6 samples
  {
    const int n = 8;
    CounterRng lrng = CounterRng::stream(kSeed, 33);
    const RademacherLaw law = biased_law(n, lrng);
    const long samples = 1000000;
    for (double t : ts) {
      std::vector<long> hits(n, 0);
      std::vector<long> base(n, 0);
      for (long i = 0; i < samples; ++i) {
        CounterRng xr = CounterRng::stream(kSeed ^ 0xAB1Eull,
                                           static_cast<std::uint64_t>(i));
        std::uint32_t x = 0;
        for (int k = 1; k <= n; ++k)
          if (xr.next_unit() < law.p(k)) x |= 1u << (k - 1);
        const std::uint32_t z =
            couple_sample(x, t, law, kSeed ^ static_cast<std::uint64_t>(1e4 * t),
                          static_cast<std::uint64_t>(i));
        for (int k = 1; k <= n; ++k) {
          const std::uint32_t bit = 1u << (k - 1);
          if ((x & bit) != 0) {
            ++base[k - 1];
            if ((z & bit) == 0) ++hits[k - 1];
          }
        }
      }
      for (int k = 1; k <= n; ++k) {
        const double want = (1.0 - std::exp(-t)) * law.p(k) * law.q(k);
        const double got = static_cast<double>(hits[k - 1]) / samples;
        const double se = std::sqrt(want * (1.0 - want) / samples);
        worst_flip_z = std::max(worst_flip_z, std::abs(got - want) / se);
      }
    }
  }
  const bool pass =
      worst_mehler <= 1e-10 && worst_asym <= 1e-12 && worst_flip_z <= 3.0;
  report(3, pass,
         "Mehler dev " + std::to_string(worst_mehler) + ", exchangeability asym " +
             std::to_string(worst_asym) + ", flip freq worst z " +
             std::to_string(worst_flip_z),
         timer.seconds());
}

// 4. regression rates and the Richardson limit of the fourth-power clock rate
void criterion4() {
  Timer timer;
  CounterRng rng = CounterRng::stream(kSeed, 4);
  bool pass = true;
  double worst_rate = 0.0, worst_rel = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(2));
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : biased_law(n, rng);
    const int p = 2 + static_cast<int>(rng.next_below(2));  // 2..3
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const RegressionReport rep = regression_check(f, law, {1e-2, 1e-3, 1e-4});
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
      const double ra = rep.rows[i].dist_a / rep.rows[i + 1].dist_a;
      const double rb = rep.rows[i].dist_b / rep.rows[i + 1].dist_b;
      pass = pass && ra >= 8.0 && ra <= 12.0 && rb >= 8.0 && rb <= 12.0;
      worst_rate = std::max({worst_rate, std::abs(ra - 10.0), std::abs(rb - 10.0)});
    }
    const double rel = std::abs(rep.c_extrapolated - rep.rho) /
                       std::max(1e-12, std::abs(rep.rho));
    worst_rel = std::max(worst_rel, rel);
    pass = pass && rel <= 1e-4;
  }
  report(4, pass,
         "decade ratios within [8,12] (worst |ratio-10| = " +
             std::to_string(worst_rate) + "), Richardson limit rel dev " +
             std::to_string(worst_rel),
         timer.seconds());
}

// 5. inequality battery and exact identities, 500 trials
void criterion5() {
  Timer timer;
  CounterRng rng = CounterRng::stream(kSeed, 5);
  double worst_slack = 0.0;     // most negative slack seen (as a positive number)
  double worst_identity = 0.0;  // max identity deviation
  auto slack = [&](double lhs, double rhs) {
    worst_slack = std::max(worst_slack, lhs - rhs);
  };
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(5));  // 6..10
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : biased_law(n, rng);
    const int p = 1 + static_cast<int>(rng.next_below(3));
    const int q = 1 + static_cast<int>(rng.next_below(3));
    const Kernel f = random_sparse_kernel(p, n, 5, rng, true);
    const Kernel g = random_sparse_kernel(q, n, 5, rng, true);

    const Tech1Report t1 = lemma_tech1_sides(f, g, law);
    slack(t1.lem1_lhs, t1.lem1_rhs);
    slack(t1.lem2_lhs_var, t1.lem2_rhs);
    slack(t1.lem2_lhs_contr, t1.lem2_rhs);
    slack(t1.lem3_lhs, t1.lem3_rhs);
    worst_identity = std::max(worst_identity, std::abs(t1.uni_lhs - t1.uni_rhs));

    // (sp-eq)
    const VarGamma vg = var_gamma(f, g, law);
    slack(vg.exact, vg.bound);

    // (use1)/(use2)
    const UseBoundsReport ub = use_bounds(f, law);
    slack(ub.var_gamma_over_p, ub.use1_rhs);
    slack(ub.use2_lhs, ub.use2_rhs);

    // Step 2 terms and the (3-terms) identity
    const Step2Report s2 = step2_covariance_terms(f, g, law);
    if (s2.equal_orders) {
      slack(std::abs(s2.term1), s2.term1_bound);
      slack(std::abs(s2.term2), s2.term2_bound);
      slack(std::abs(s2.term3), s2.term3_bound);
      worst_identity =
          std::max(worst_identity, std::abs(s2.identity_exact - s2.identity_sum));
    } else {
      slack(s2.cov_abs, s2.cov_bound);
    }

    // (NR14-0)
    {
      double rhs = 0.0;
      for (int r = 0; r <= std::min(p, q); ++r)
        rhs += factorial(p) * factorial(q) * binomial(p, r) * binomial(q, r) *
               norm_sq(contract(f, g, r));
      const double lhs = factorial(p + q) * sym_tensor_norm_sq(f, g);
      worst_identity = std::max(worst_identity, std::abs(lhs - rhs));
    }
    // (fact-0)
    if (p == q)
      for (int r = 1; r <= q - 1; ++r) {
        const double lhs = norm_sq(contract(f, g, r));
        const double rhs = inner(contract(f, f, q - r), contract(g, g, q - r));
        worst_identity = std::max(worst_identity, std::abs(lhs - rhs));
      }
  }
  const bool pass = worst_slack <= 1e-10 && worst_identity <= 1e-10;
  report(5, pass,
         "500-trial battery: worst inequality slack " + std::to_string(worst_slack) +
             ", worst identity deviation " + std::to_string(worst_identity),
         timer.seconds());
}

// 6. Wasserstein fourth-moment-influence theorem end-to-end
void criterion6() {
  Timer timer;
  CounterRng rng = CounterRng::stream(kSeed, 6);
  double worst_slack = 0.0;
  double min_margin = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 7 + static_cast<int>(rng.next_below(4));  // 7..10
    const RademacherLaw law =
        trial % 2 == 0 ? RademacherLaw::symmetric(n) : biased_law(n, rng);
    const int p = 2 + static_cast<int>(rng.next_below(2));  // 2..3
    const Kernel f = random_sparse_kernel(p, n, 4 + static_cast<int>(rng.next_below(5)),
                                          rng, true);
    const BoundReport rep = dw_bound_univariate(f, law);
    worst_slack = std::max(worst_slack, rep.lhs - rep.rhs);
    min_margin = std::min(min_margin, rep.rhs - rep.lhs);
  }
  const double secs = timer.seconds();
  const bool pass = worst_slack <= 1e-10 && secs <= 300.0;
  report(6, pass,
         "W1 <= C1 sqrt|kappa4| + C2 sqrt(M) on 50 kernels, min margin " +
             std::to_string(min_margin),
         secs);
}

// 7. counterexample reproduction at q = 2
void criterion7() {
  Timer timer;
  double worst_m = 0.0;
  for (int n : {16, 64, 256, 1024, 5000}) {
    const Kernel f = make_counterexample_kernel(2, n);
    worst_m = std::max(worst_m, std::abs(max_influence(f) - 0.25));
  }

  const int n = 5000;
  const long samples = 1000000;
  const Kernel f = make_counterexample_kernel(2, n);

  const auto rad = sample_Q(
      f, SamplerSpec::rademacher(RademacherLaw::symmetric(n), kSeed + 7), samples,
      kThreads);
  const MomentStats rs = sample_moments(rad);
  const W1Estimate rw = w1_mc_vs_gaussian(rad, kSeed + 17);

  const auto gau = sample_Q(f, SamplerSpec::gaussian(kSeed + 27), samples, kThreads);
  const MomentStats gs = sample_moments(gau);

  const double z_rad = std::abs(rs.m4 - 3.0) / rs.se_m4;
  const double z_gau = std::abs(gs.m4 - 9.0) / gs.se_m4;
  const bool pass =
      worst_m <= 1e-12 && z_rad <= 3.0 && rw.value <= 0.05 && z_gau <= 3.0;
  report(7, pass,
         "M = 1/4 exactly (dev " + std::to_string(worst_m) +
             "); N=5000: rademacher m4 z = " + std::to_string(z_rad) +
             ", W1 = " + std::to_string(rw.value) +
             ", gaussian m4 z = " + std::to_string(z_gau),
         timer.seconds());
}

// 8. multivariate sweep: bound and discrepancy co-decrease
void criterion8() {
  Timer timer;
  const std::vector<int> ns{16, 64, 256, 1024};
  const long samples = 400000;
  const Matrix identity{{1.0, 0.0}, {0.0, 1.0}};
  const double eg_z = gaussian_expectation(
      [](const std::vector<double>& z) { return std::cos(z[0]) * std::cos(z[1]); },
      identity, 32);

  std::vector<double> rhs, rhs_se, disc, disc_se;
  double worst_fc = 0.0;
  for (int n : ns) {
    MultivariateInput in;
    in.kernels = {make_uniform_first_order(n), make_matching_kernel(n)};
    in.law = RademacherLaw::symmetric(n);
    in.target_cov = identity;
    MultivariateOptions opt;
    opt.mc_samples = samples;
    opt.seed = kSeed ^ (0x8888ull * (n + 1));
    opt.threads = kThreads;
    const MultivariateReport rep = multivariate_bound(in, opt);
    rhs.push_back(rep.rhs);
    // only term1 carries Monte Carlo noise
    rhs_se.push_back(rep.e_s_norm_se * rep.lambda_inv_op * std::sqrt(2.0) / 4.0);

    // first-chaos formulas vs enumeration (within cap) and the kernel route
    const FirstChaosReport fc = first_chaos_exact(in.kernels[0], in.law);
    const ChaosDecomposition sq = multiply_symmetric(in.kernels[0], in.kernels[0]);
    const double ef4_kernel = expect_product(sq, sq);
    worst_fc = std::max(worst_fc, std::abs(fc.fourth_moment_formula - ef4_kernel));
    if (fc.fourth_moment_enum)
      worst_fc = std::max(worst_fc,
                          std::abs(fc.fourth_moment_formula - *fc.fourth_moment_enum));

    // smooth-test discrepancy
    if (n <= kDefaultExactCap) {
      const HypercubeFunction f1 = HypercubeFunction::from_kernel(in.kernels[0], in.law);
      const HypercubeFunction f2 = HypercubeFunction::from_kernel(in.kernels[1], in.law);
      HypercubeFunction gt(n, 0.0);
      for (std::uint32_t m = 0; m < gt.atoms(); ++m)
        gt[m] = std::cos(f1[m]) * std::cos(f2[m]);
      disc.push_back(std::abs(expect_exact(gt, in.law) - eg_z));
      disc_se.push_back(0.0);
    } else {
      double s1 = 0.0, s2 = 0.0;
      const Kernel& h = in.kernels[0];
      const Kernel& fm = in.kernels[1];
      std::vector<double> y(static_cast<std::size_t>(n));
      for (long i = 0; i < samples; ++i) {
        for (int k = 1; k <= n; ++k) {
          CounterRng rng = CounterRng::stream(opt.seed ^ 0x99ull,
                                              static_cast<std::uint64_t>(i),
                                              static_cast<std::uint64_t>(k));
          y[static_cast<std::size_t>(k - 1)] = rng.next_unit() < 0.5 ? -1.0 : 1.0;
        }
        double q1 = 0.0, q2 = 0.0;
        for (const auto& [key, v] : h.entries()) q1 += v * y[key[0] - 1];
        for (const auto& [key, v] : fm.entries())
          q2 += 2.0 * v * y[key[0] - 1] * y[key[1] - 1];
        const double val = std::cos(q1) * std::cos(q2);
        s1 += val;
        s2 += val * val;
      }
      const double mean = s1 / samples;
      const double se =
          std::sqrt(std::max(0.0, s2 / samples - mean * mean) / samples);
      disc.push_back(std::abs(mean - eg_z));
      disc_se.push_back(se);
    }
  }

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
    monotone = monotone &&
               rhs[i + 1] <= rhs[i] + 3.0 * (rhs_se[i] + rhs_se[i + 1]);
    monotone = monotone &&
               disc[i + 1] <= disc[i] + 3.0 * (disc_se[i] + disc_se[i + 1]);
  }
  const bool pass = monotone && worst_fc <= 1e-10;
  std::string detail = "rhs sweep ";
  for (double r : rhs) detail += std::to_string(r) + " ";
  detail += "| discrepancy ";
  for (double d : disc) detail += std::to_string(d) + " ";
  detail += "| first-chaos dev " + std::to_string(worst_fc);
  report(8, pass, detail, timer.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures == 0) {
    std::printf("acceptance: all 8 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
