#include "rchaos/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "rchaos/math.hpp"
#include "rchaos/sampling.hpp"

namespace rchaos {

namespace {

constexpr double kNormTol = 1e-10;

void require_normalized(const Kernel& f, const char* who) {
  const double v = factorial(f.order()) * norm_sq(f);
  if (std::abs(v - 1.0) > kNormTol)
    throw InputError(std::string(who) + ": kernel must satisfy p! ||f||^2 = 1");
}

double clamp0(double x) { return x > 0.0 ? x : 0.0; }

// sum over common stored keys of a*b; tolerates different ambient dims
// (components of a vector may carry kernels over different universes).
double key_sum(const Kernel& a, const Kernel& b) {
  const Kernel* s = &a;
  const Kernel* l = &b;
  if (s->support_size() > l->support_size()) std::swap(s, l);
  double acc = 0.0;
  for (const auto& [k, v] : s->entries()) acc += v * l->coeff(k);
  return acc;
}

}  // namespace

double gamma_p(int p) {
  if (p < 1) throw InputError("gamma_p: p must be >= 1");
  double s = 0.0;
  for (int r = 1; r <= p; ++r) {
    const double c = binomial(p, r);
    s += factorial(r) * c * c;
  }
  return factorial(2 * p) / factorial(p) * s;
}

double expect_product(const ChaosDecomposition& a, const ChaosDecomposition& b) {
  double s = a.constant * b.constant;
  for (const auto& [k, ha] : a.kernels) {
    const Kernel* hb = b.find(k);
    if (hb) s += factorial(k) * factorial(k) * key_sum(ha, *hb);
  }
  return s;
}

double w1_atoms_vs_gaussian(const AtomLaw& atoms) {
  const std::size_t m = atoms.values.size();
  if (m == 0) throw InputError("w1_atoms_vs_gaussian: empty atom law");
  const auto H = normal_cdf_antiderivative;

  // integral over (a, b) of |Phi - c|, splitting at the crossing point
  auto segment = [&](double a, double b, double c) {
    auto raw = [&](double lo, double hi) {  // integral of (Phi - c)
      return H(hi) - H(lo) - c * (hi - lo);
    };
    if (c <= 0.0) return raw(a, b);
    if (c >= 1.0) return -raw(a, b);
    const double x = normal_quantile(c);
    if (x <= a) return raw(a, b);
    if (x >= b) return -raw(a, b);
    return -raw(a, x) + raw(x, b);
  };

  double total = H(atoms.values.front());  // (-inf, v_1): CDF_F = 0
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    cum += atoms.probs[i];
    total += segment(atoms.values[i], atoms.values[i + 1], std::min(cum, 1.0));
  }
  const double vm = atoms.values.back();
  total += H(vm) - vm;  // (v_m, inf): integral of (1 - Phi)
  return total;
}

double wasserstein_exact(const Kernel& f, const RademacherLaw& law, int exact_cap) {
  return w1_atoms_vs_gaussian(atom_distribution(f, law, exact_cap));
}

BoundReport dw_bound_univariate(const Kernel& f, const RademacherLaw& law,
                                const UnivariateOptions& opt) {
  require_normalized(f, "dw_bound_univariate");
  const int p = f.order();
  BoundReport rep;
  rep.order = p;
  rep.influence = max_influence(f);
  for (int r = 1; r <= p - 1; ++r)
    rep.contraction_norm_sq[r] = norm_sq(contract(f, f, r));

  if (law.dim() <= opt.exact_cap) {
    const auto ms = moments(f, law, {2, 4}, opt.exact_cap);
    rep.second_moment = ms.at(2);
    rep.fourth_moment = ms.at(4);
    rep.lhs = wasserstein_exact(f, law, opt.exact_cap);
    rep.exact = true;
  } else {
    const auto xs = sample_Q(f, SamplerSpec::rademacher(law, opt.seed),
                             opt.mc_samples, opt.threads);
    const MomentStats st = sample_moments(xs);
    rep.second_moment = st.m2;
    rep.fourth_moment = st.m4;
    rep.fourth_moment_se = st.se_m4;
    const W1Estimate w1 = w1_mc_vs_gaussian(xs, opt.seed ^ 0x5EEDull);
    rep.lhs = w1.value;
    rep.lhs_se = w1.se;
    rep.exact = false;
  }
  rep.fourth_cumulant = rep.fourth_moment - 3.0 * rep.second_moment * rep.second_moment;

  const double gp = gamma_p(p);
  const double c1 = std::sqrt(2.0 / kPi) + 4.0 / 3.0;
  const double c2 = (std::sqrt(2.0 / kPi) + 2.0 * std::sqrt(6.0) / 3.0) * std::sqrt(gp);
  rep.constants["C1=sqrt(2/pi)+4/3"] = c1;
  rep.constants["C2=(sqrt(2/pi)+2*sqrt(6)/3)*sqrt(gamma_p)"] = c2;
  rep.constants["gamma_p"] = gp;
  rep.rhs = c1 * std::sqrt(std::abs(rep.fourth_cumulant)) +
            c2 * std::sqrt(rep.influence);
  return rep;
}

FirstChaosReport first_chaos_exact(const Kernel& h, const RademacherLaw& law,
                                   int exact_cap) {
  if (h.order() != 1) throw InputError("first_chaos_exact: kernel order must be 1");
  require_normalized(h, "first_chaos_exact");
  FirstChaosReport rep;
  double sum_qp2 = 0.0;
  for (const auto& [key, v] : h.entries()) {
    const int k = key[0];
    const double h4 = v * v * v * v;
    const double pk = law.p(k), qk = law.q(k);
    rep.sum_h4 += h4;
    rep.sum_h4_over_pq += h4 / (pk * qk);
    sum_qp2 += h4 * (qk - pk) * (qk - pk) / (pk * qk);
  }
  rep.fourth_moment_formula = 3.0 + sum_qp2 - 2.0 * rep.sum_h4;
  if (law.dim() <= exact_cap)
    rep.fourth_moment_enum = moments(h, law, {4}, exact_cap).at(4);
  rep.dw_bound = std::sqrt(rep.sum_h4_over_pq);
  rep.kol_bound = 2.0 * rep.dw_bound;

  rep.homogeneous = true;
  const double p0 = law.p(1);
  for (int k = 2; k <= law.dim(); ++k)
    if (law.p(k) != p0) rep.homogeneous = false;
  if (rep.homogeneous) {
    const double q0 = 1.0 - p0;
    const double denom = p0 * p0 + q0 * q0 - 4.0 * p0 * q0;
    rep.coefficient = denom / (p0 * q0);
    // The exact fourth-moment bound divides by p^2 + q^2 - 4pq, which
    // vanishes at p = 1/2 +- 1/(2 sqrt(3)); report it inapplicable there.
    rep.exact_fm_applicable = std::abs(denom) >= 1e-9;
    if (rep.exact_fm_applicable) {
      const double kappa = rep.fourth_moment_formula - 3.0;
      rep.exact_fm_dw = std::sqrt(clamp0(kappa / denom));
      rep.exact_fm_kol = 2.0 * rep.exact_fm_dw;
    }
  }
  return rep;
}

Tech1Report lemma_tech1_sides(const Kernel& f, const Kernel& g,
                              const RademacherLaw& law, int exact_cap) {
  const int p = f.order(), q = g.order();
  Tech1Report rep;

  const HypercubeFunction F = HypercubeFunction::from_kernel(f, law, exact_cap);
  const HypercubeFunction G = HypercubeFunction::from_kernel(g, law, exact_cap);
  const HypercubeFunction FG = F * G;
  const HypercubeFunction F2 = F * F;

  rep.e_fg = expect_exact(FG, law);
  rep.e_f2g2 = expect_exact(FG * FG, law);
  rep.var_f = variance_exact(F, law);
  rep.var_g = variance_exact(G, law);
  rep.leak_fg = sym_tensor_offdiag_norm_sq(f, g);
  rep.leak_ff = sym_tensor_offdiag_norm_sq(f, f);

  const ChaosDecomposition dfg = walsh_decompose(FG, law);
  for (const auto& [k, h] : dfg.kernels)
    if (k <= p + q - 1) rep.lem1_lhs += factorial(k) * norm_sq(h);
  rep.lem1_rhs = rep.e_f2g2 - 2.0 * rep.e_fg * rep.e_fg - rep.var_f * rep.var_g +
                 factorial(p + q) * rep.leak_fg;

  const ChaosDecomposition df2 = walsh_decompose(F2, law);
  for (const auto& [k, h] : df2.kernels)
    if (k <= 2 * p - 1) rep.lem2_lhs_var += factorial(k) * norm_sq(h);
  for (int r = 1; r <= p - 1; ++r) {
    const double c = binomial(p, r);
    rep.lem2_lhs_contr +=
        factorial(p) * factorial(p) * c * c * norm_sq(contract(f, f, r));
  }
  const double ef2 = expect_exact(F2, law);
  const double ef4 = expect_exact(F2 * F2, law);
  rep.lem2_rhs = ef4 - 3.0 * ef2 * ef2 + factorial(2 * p) * rep.leak_ff;

  rep.lem3_lhs = rep.leak_fg;
  const double cap_fg = std::min(norm_sq(f) * max_influence(g),
                                 norm_sq(g) * max_influence(f));
  for (int r = 1; r <= std::min(p, q); ++r)
    rep.lem3_rhs += factorial(r) * binomial(p, r) * binomial(q, r) * cap_fg;

  rep.uni_lhs = rep.lem2_lhs_var;
  rep.uni_rhs = ef4 - 3.0 * ef2 * ef2 - rep.lem2_lhs_contr +
                factorial(2 * p) * rep.leak_ff;
  return rep;
}

UseBoundsReport use_bounds(const Kernel& f, const RademacherLaw& law, int exact_cap) {
  require_normalized(f, "use_bounds");
  const int p = f.order();
  UseBoundsReport rep;
  rep.influence = max_influence(f);

  const HypercubeFunction F = HypercubeFunction::from_kernel(f, law, exact_cap);
  const HypercubeFunction F2 = F * F;
  const double ef2 = expect_exact(F2, law);
  const double ef4 = expect_exact(F2 * F2, law);
  rep.fourth_moment = ef4;

  const ChaosDecomposition gamma = carre_du_champ(f, f, law, exact_cap);
  const HypercubeFunction gamma_tab = gamma.to_hypercube(law, exact_cap);
  const double e_gamma = expect_exact(gamma_tab, law);
  const double e_gamma2 = expect_exact(gamma_tab * gamma_tab, law);
  rep.var_gamma_over_p = (e_gamma2 - e_gamma * e_gamma) / (p * p);

  const double gp = gamma_p(p);
  rep.use1_rhs = ef4 - 3.0 * ef2 * ef2 + gp * ef2 * rep.influence;

  rep.use2_lhs = 3.0 * expect_exact(F2 * gamma_tab, law) - p * ef4;
  rep.use2_rhs = 2.0 * p * (ef4 - 3.0) + 3.0 * p * gp * rep.influence;
  rep.rho = 4.0 * rep.use2_lhs;
  rep.rho_rhs = 4.0 * rep.use2_rhs;
  return rep;
}

CovarianceReport covariance_matrix(const std::vector<Kernel>& kernels,
                                   const RademacherLaw& law, int exact_cap) {
  const int d = static_cast<int>(kernels.size());
  if (d == 0) throw InputError("covariance_matrix: no kernels");
  CovarianceReport rep;
  rep.formula.assign(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (kernels[i].order() == kernels[j].order()) {
        const double of = factorial(kernels[i].order());
        rep.formula[i][j] = of * of * key_sum(kernels[i], kernels[j]);
      }

  if (law.dim() <= exact_cap) {
    std::vector<HypercubeFunction> tabs;
    tabs.reserve(d);
    for (const auto& k : kernels)
      tabs.push_back(HypercubeFunction::from_kernel(k, law, exact_cap));
    Matrix enumeration(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        enumeration[i][j] = expect_exact(tabs[i] * tabs[j], law);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        rep.max_deviation = std::max(rep.max_deviation,
                                     std::abs(enumeration[i][j] - rep.formula[i][j]));
    rep.enumeration = std::move(enumeration);
  }
  return rep;
}

namespace {

// Gamma(F_i, F_j) via the symmetric-case product expansion, usable beyond
// the enumeration cap: rescale J_k of multiply_symmetric per the spectral
// identity Gamma = (p+q)/2 E[FG] + sum_k (p+q-k)/2 J_k(FG).
ChaosDecomposition gamma_from_kernels(const Kernel& f, const Kernel& g) {
  const int p = f.order(), q = g.order();
  ChaosDecomposition prod = multiply_symmetric(f, g);
  ChaosDecomposition gamma;
  gamma.dim = prod.dim;
  gamma.assumes_symmetric_law = true;
  gamma.constant = 0.5 * (p + q) * prod.constant;
  for (const auto& [k, h] : prod.kernels) {
    const double w = 0.5 * (p + q - k);
    if (w != 0.0) gamma.add_kernel(k, h, w);
  }
  gamma.prune();
  return gamma;
}

void validate_multivariate(const MultivariateInput& in) {
  const int d = static_cast<int>(in.kernels.size());
  if (d == 0) throw InputError("multivariate_bound: no kernels");
  for (int i = 1; i < d; ++i)
    if (in.kernels[i].order() < in.kernels[i - 1].order())
      throw InputError("multivariate_bound: component orders must be nondecreasing");
  if (in.target_cov) {
    const Matrix& s = *in.target_cov;
    if (static_cast<int>(s.size()) != d)
      throw InputError("multivariate_bound: covariance size mismatch");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (std::abs(s[i][j] - s[j][i]) > 1e-12)
          throw InputError("multivariate_bound: covariance must be symmetric");
    const auto ev = symmetric_eigenvalues(s);
    if (!ev.empty() && ev.front() < -1e-12)
      throw InputError("multivariate_bound: covariance must be nonnegative definite");
  }
}

}  // namespace

MultivariateReport multivariate_bound(const MultivariateInput& input,
                                      const MultivariateOptions& opt) {
  validate_multivariate(input);
  const int d = static_cast<int>(input.kernels.size());
  const RademacherLaw& law = input.law;
  MultivariateReport rep;

  if (input.target_cov) {
    rep.sigma = *input.target_cov;
  } else {
    rep.sigma = covariance_matrix(input.kernels, law, opt.exact_cap).formula;
  }

  double min_order = input.kernels.front().order();
  rep.lambda_inv_op = 1.0 / min_order;

  const bool exact = law.dim() <= opt.exact_cap;
  rep.exact = exact;
  if (!exact && !law.is_symmetric())
    throw ResourceError(
        "multivariate_bound: beyond the exact cap only symmetric laws are supported");

  // Gamma decompositions for every (i, j) pair.
  std::vector<std::vector<ChaosDecomposition>> gam(d);
  for (int i = 0; i < d; ++i) gam[i].resize(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      gam[i][j] = exact
                      ? carre_du_champ(input.kernels[i], input.kernels[j], law,
                                       opt.exact_cap)
                      : gamma_from_kernels(input.kernels[i], input.kernels[j]);
      if (j != i) gam[j][i] = gam[i][j];
    }
  }

  rep.var_gamma.assign(d, std::vector<double>(d, 0.0));
  rep.cov_sq_terms.assign(d, std::vector<double>(d, 0.0));
  rep.rho.assign(d, 0.0);
  rep.trace_term = 0.0;

  // per-component fourth moments and E[F^2 Gamma] via the product expansion
  std::vector<ChaosDecomposition> sq(d);
  for (int i = 0; i < d; ++i)
    sq[i] = exact ? walsh_decompose(
                        [&] {
                          const HypercubeFunction t = HypercubeFunction::from_kernel(
                              input.kernels[i], law, opt.exact_cap);
                          return t * t;
                        }(),
                        law)
                  : multiply_symmetric(input.kernels[i], input.kernels[i]);

  for (int i = 0; i < d; ++i) {
    const int qi = input.kernels[i].order();
    const double ef4 = expect_product(sq[i], sq[i]);
    const double e_f2_gamma = expect_product(sq[i], gam[i][i]);
    rep.rho[i] = -4.0 * qi * ef4 + 12.0 * e_f2_gamma;
    const double e_sii = 2.0 * gam[i][i].constant - 2.0 * qi * rep.sigma[i][i];
    rep.trace_term += 2.0 * qi * rep.sigma[i][i] + e_sii;
    for (int j = 0; j < d; ++j) {
      rep.var_gamma[i][j] = gam[i][j].variance();
      const double e_fifj = rep.sigma[i][j];
      rep.cov_sq_terms[i][j] = expect_product(sq[i], sq[j]) -
                               sq[i].constant * sq[j].constant -
                               2.0 * e_fifj * e_fifj;
    }
  }

  // E[sqrt(sum_ij S_ij^2)] with S_ij = 2 Gamma_ij - 2 q_j Sigma_ij.
  auto s_shift = [&](int i, int j) {
    return 2.0 * input.kernels[j].order() * rep.sigma[i][j];
  };
  if (exact) {
    std::vector<std::vector<HypercubeFunction>> gtab;
    gtab.reserve(d);
    for (int i = 0; i < d; ++i) {
      std::vector<HypercubeFunction> row;
      for (int j = 0; j < d; ++j)
        row.push_back(gam[i][j].to_hypercube(law, opt.exact_cap));
      gtab.push_back(std::move(row));
    }
    HypercubeFunction snorm(law.dim(), 0.0);
    for (std::uint32_t m = 0; m < snorm.atoms(); ++m) {
      double ss = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double sij = 2.0 * gtab[i][j][m] - s_shift(i, j);
          ss += sij * sij;
        }
      snorm[m] = std::sqrt(ss);
    }
    rep.e_s_norm = expect_exact(snorm, law);
  } else {
    // Monte Carlo over the coordinates that actually appear in some Gamma.
    std::vector<int> coords;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        for (const auto& [k, h] : gam[i][j].kernels) {
          const auto ac = h.active_coordinates();
          coords.insert(coords.end(), ac.begin(), ac.end());
        }
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

    const long n = opt.mc_samples;
    const int n_chunks = static_cast<int>((n + 16383) / 16384);
    std::vector<double> chunk_sum(n_chunks, 0.0), chunk_sq(n_chunks, 0.0);
    parallel_chunks(n, 16384, opt.threads, [&](int c, long begin, long end) {
      std::vector<double> y(coords.size());
      double s1 = 0.0, s2 = 0.0;
      for (long it = begin; it < end; ++it) {
        for (std::size_t a = 0; a < coords.size(); ++a) {
          CounterRng rng = CounterRng::stream(
              opt.seed, static_cast<std::uint64_t>(it),
              static_cast<std::uint64_t>(coords[a]));
          const int k = coords[a];
          y[a] = rng.next_unit() < law.p(k) ? law.y_plus(k) : law.y_minus(k);
        }
        auto eval_decomp = [&](const ChaosDecomposition& dec) {
          double s = dec.constant;
          for (const auto& [ord, h] : dec.kernels) {
            double qsum = 0.0;
            for (const auto& [key, v] : h.entries()) {
              double prod = v;
              for (int k : key) {
                const auto pos = std::lower_bound(coords.begin(), coords.end(), k);
                prod *= y[static_cast<std::size_t>(pos - coords.begin())];
              }
              qsum += prod;
            }
            s += factorial(ord) * qsum;
          }
          return s;
        };
        double ss = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            const double sij = 2.0 * eval_decomp(gam[i][j]) - s_shift(i, j);
            ss += sij * sij;
          }
        const double val = std::sqrt(ss);
        s1 += val;
        s2 += val * val;
      }
      chunk_sum[c] = s1;
      chunk_sq[c] = s2;
    });
    double s1 = 0.0, s2 = 0.0;
    for (int c = 0; c < n_chunks; ++c) {
      s1 += chunk_sum[c];
      s2 += chunk_sq[c];
    }
    rep.e_s_norm = s1 / n;
    rep.e_s_norm_se =
        std::sqrt(clamp0(s2 / n - rep.e_s_norm * rep.e_s_norm) / n);
  }

  double rho_sum = 0.0;
  for (double r : rep.rho) rho_sum += clamp0(r);
  const double sd = std::sqrt(static_cast<double>(d));
  rep.term1 = rep.lambda_inv_op * sd * input.m2 / 4.0 * rep.e_s_norm;
  rep.term2 = sd * input.m3 * rep.lambda_inv_op / 18.0 *
              std::sqrt(clamp0(rep.trace_term)) * std::sqrt(rho_sum);
  rep.rhs = rep.term1 + rep.term2;
  return rep;
}

Step2Report step2_covariance_terms(const Kernel& f_in, const Kernel& g_in,
                                   const RademacherLaw& law, int exact_cap) {
  const Kernel& f = f_in.order() <= g_in.order() ? f_in : g_in;
  const Kernel& g = f_in.order() <= g_in.order() ? g_in : f_in;
  const int p = f.order(), q = g.order();

  Step2Report rep;
  rep.equal_orders = (p == q);

  const HypercubeFunction F = HypercubeFunction::from_kernel(f, law, exact_cap);
  const HypercubeFunction G = HypercubeFunction::from_kernel(g, law, exact_cap);
  const HypercubeFunction F2 = F * F;
  const HypercubeFunction G2 = G * G;
  const double ef2 = expect_exact(F2, law);
  const double eg2 = expect_exact(G2, law);
  const double ef4 = expect_exact(F2 * F2, law);
  const double eg4 = expect_exact(G2 * G2, law);
  const double efg = expect_exact(F * G, law);
  const double cov = expect_exact(F2 * G2, law) - ef2 * eg2;

  const double gq = gamma_p(q);
  const double use1_f = clamp0(ef4 - 3.0 * ef2 * ef2 + gq * ef2 * max_influence(f));
  const double use1_g = clamp0(eg4 - 3.0 * eg2 * eg2 + gq * eg2 * max_influence(g));

  if (!rep.equal_orders) {
    rep.cov_abs = std::abs(cov);
    rep.cov_bound = std::sqrt(clamp0(ef4)) * std::sqrt(use1_g);
    return rep;
  }

  rep.identity_exact = cov - 2.0 * efg * efg;

  // term 1: cross-projections sum_{k=1}^{2q-1} E[J_k(F^2) J_k(G^2)]
  const ChaosDecomposition df2 = walsh_decompose(F2, law);
  const ChaosDecomposition dg2 = walsh_decompose(G2, law);
  for (const auto& [k, h] : df2.kernels) {
    if (k > 2 * q - 1) continue;
    const Kernel* hg = dg2.find(k);
    if (hg) rep.term1 += factorial(k) * inner(h, *hg);
  }
  rep.term1_bound = std::sqrt(use1_f) * std::sqrt(use1_g);

  // term 2: mixed contractions sum_r q!^2 C(q,r)^2 <f x_r g, g x_r f>
  for (int r = 1; r <= q - 1; ++r) {
    const double c = binomial(q, r);
    rep.term2 += factorial(q) * factorial(q) * c * c *
                 inner(contract(f, g, r), contract(g, f, r));
  }
  rep.term2_bound = std::sqrt(use1_f) * std::sqrt(use1_g);

  // term 3: off-diagonal correction -(2q)! <f (x)~ f, g (x)~ g 1_{Delta^c}>
  rep.term3 = -factorial(2 * q) * sym_tensor_offdiag_inner(f, f, g, g);
  rep.term3_bound = norm_sq(f) * std::sqrt(factorial(2 * q) * gq * eg2 *
                                           max_influence(g));

  rep.identity_sum = rep.term1 + rep.term2 + rep.term3;
  return rep;
}

}  // namespace rchaos
