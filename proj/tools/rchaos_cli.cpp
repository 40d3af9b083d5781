// Command-line front end: invariant-suite runner, bound evaluators, Walsh
// decomposition, coupling diagnostics and the Monte Carlo experiments.
//
// Exit codes: 0 pass, 1 check failure, 2 input error, 3 resource error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rchaos/bounds.hpp"
#include "rchaos/chaos.hpp"
#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"
#include "rchaos/math.hpp"
#include "rchaos/ou.hpp"
#include "rchaos/sampling.hpp"
#include "rchaos/verify.hpp"

namespace fs = std::filesystem;
using namespace rchaos;

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string mode_exact() { return "exact"; }
std::string mode_mc(double se) { return "mc(se=" + fmt6(se) + ")"; }

// Global options shared by every subcommand.
struct Global {
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out_dir;
  int exact_cap = kDefaultExactCap;

  bool has_out() const { return !out_dir.empty(); }
};

// Resolved key=value configuration, written next to the outputs of a run.
class Config {
 public:
  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }
  void set(const std::string& key, double value) { entries_[key] = fmt(value); }
  void set(const std::string& key, long value) { entries_[key] = std::to_string(value); }
  void set_global(const Global& g) {
    entries_["seed"] = std::to_string(g.seed);
    entries_["threads"] = std::to_string(g.threads);
    entries_["exact_cap"] = std::to_string(g.exact_cap);
    if (g.has_out()) entries_["out"] = g.out_dir;
  }
  void write(std::ostream& os, const std::string& prefix) const {
    for (const auto& [k, v] : entries_) os << prefix << k << "=" << v << "\n";
  }

 private:
  std::map<std::string, std::string> entries_;
};

// CSV sink: either a file under --out (config written alongside) or stdout
// (config inlined as comment lines). Identical config + seed reproduce the
// bytes exactly.
class CsvSink {
 public:
  CsvSink(const Global& g, const std::string& name, const Config& cfg) {
    if (g.has_out()) {
      fs::create_directories(g.out_dir);
      const fs::path base = fs::path(g.out_dir) / name;
      file_.open(base.string() + ".csv");
      if (!file_) throw InputError("cannot open output file under " + g.out_dir);
      std::ofstream cfg_file(base.string() + ".config");
      cfg.write(cfg_file, "");
      os_ = &file_;
    } else {
      cfg.write(std::cout, "# ");
      os_ = &std::cout;
    }
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      *os_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

// ---- law / kernel / sampler argument plumbing ---------------------------

struct LawArgs {
  std::string law_file;
  int symmetric_n = 0;

  void attach(CLI::App* cmd) {
    auto* a = cmd->add_option("--law", law_file, "law file (one p_k per line)");
    auto* b = cmd->add_option("--symmetric", symmetric_n,
                              "symmetric law on N coordinates (all p_k = 1/2)");
    a->excludes(b);
  }

  RademacherLaw resolve(int fallback_dim = 0) const {
    if (!law_file.empty()) return RademacherLaw::load(law_file);
    if (symmetric_n > 0) return RademacherLaw::symmetric(symmetric_n);
    if (fallback_dim > 0) return RademacherLaw::symmetric(fallback_dim);
    throw InputError("no law given: pass --law FILE or --symmetric N");
  }

  std::string describe() const {
    if (!law_file.empty()) return "file:" + law_file;
    if (symmetric_n > 0) return "symmetric:" + std::to_string(symmetric_n);
    return "symmetric:kernel-dim";
  }
};

DiscreteDist load_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open table file " + path);
  DiscreteDist d;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v, p;
    if (ls >> v >> p) {
      d.values.push_back(v);
      d.probs.push_back(p);
    }
  }
  d.validate();
  return d;
}

Matrix load_matrix(const std::string& path, int d) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open matrix file " + path);
  Matrix m(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!(is >> m[i][j])) throw InputError("matrix file too short: " + path);
  return m;
}

int finish(bool all_pass) { return all_pass ? 0 : 1; }

// ---- subcommand: verify ---------------------------------------------------

int cmd_verify(const Global& g, const std::string& suite) {
  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("verify"));
  cfg.set("suite", suite);
  const SuiteResult res = run_suite(suite, g.seed);
  CsvSink csv(g, "verify_" + suite, cfg);
  csv.row({"suite", "check", "trial", "deviation", "tolerance", "mode", "pass"});
  for (const auto& r : res.rows)
    csv.row({r.suite, r.check, std::to_string(r.trial), fmt(r.deviation),
             fmt(r.tolerance), r.mode, r.pass ? "1" : "0"});
  std::cerr << "verify " << suite << ": " << res.rows.size() << " checks, "
            << res.failures() << " failures\n";
  return finish(res.all_pass());
}

// ---- subcommand: sample ---------------------------------------------------

struct SampleArgs {
  std::string kernel_file;
  LawArgs law;
  bool gaussian = false;
  std::string custom_table;
  long samples = 100000;
  bool binary = false;
};

int cmd_sample(const Global& g, const SampleArgs& a) {
  const Kernel f = load_kernel(a.kernel_file);
  SamplerSpec spec = SamplerSpec::gaussian(g.seed);
  std::string xi = "gaussian";
  if (!a.gaussian && a.custom_table.empty()) {
    spec = SamplerSpec::rademacher(a.law.resolve(f.dim()), g.seed);
    xi = "rademacher(" + a.law.describe() + ")";
  } else if (!a.custom_table.empty()) {
    spec = SamplerSpec::custom(load_table(a.custom_table), g.seed);
    xi = "custom:" + a.custom_table;
  }
  const std::vector<double> xs = sample_Q(f, spec, a.samples, g.threads);

  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("sample"));
  cfg.set("kernel", a.kernel_file);
  cfg.set("xi", xi);
  cfg.set("samples", a.samples);
  cfg.set("binary", std::string(a.binary ? "1" : "0"));

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (g.has_out()) {
    fs::create_directories(g.out_dir);
    const fs::path base = fs::path(g.out_dir) / "samples";
    std::ofstream cfg_file(base.string() + ".config");
    cfg.write(cfg_file, "");
    file.open(base.string() + (a.binary ? ".bin" : ".txt"),
              a.binary ? std::ios::binary : std::ios::out);
    if (!file) throw InputError("cannot open sample output under " + g.out_dir);
    os = &file;
  }
  if (a.binary) {
    os->write(reinterpret_cast<const char*>(xs.data()),
              static_cast<std::streamsize>(xs.size() * sizeof(double)));
  } else {
    for (double x : xs) *os << fmt(x) << "\n";
  }
  return 0;
}

// ---- subcommand: decompose ------------------------------------------------

int cmd_decompose(const Global& g, const std::string& function_file,
                  const LawArgs& law_args, double prune_eps) {
  const HypercubeFunction F = load_hypercube(function_file);
  if (F.dim() > g.exact_cap)
    throw ResourceError("decompose: table dimension exceeds --exact-cap");
  const RademacherLaw law = law_args.resolve(F.dim());
  if (law.dim() != F.dim())
    throw InputError("decompose: law dimension does not match the table");
  const ChaosDecomposition d = walsh_decompose(F, law, prune_eps);

  const HypercubeFunction back = d.to_hypercube(law, g.exact_cap);
  double recon = 0.0;
  for (std::uint32_t m = 0; m < F.atoms(); ++m)
    recon = std::max(recon, std::abs(F[m] - back[m]));

  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("decompose"));
  cfg.set("function", function_file);
  cfg.set("law", law_args.describe());
  cfg.set("prune", prune_eps);

  CsvSink csv(g, "decompose", cfg);
  csv.row({"order", "support", "variance_contribution", "reconstruction_max_dev"});
  csv.row({"0", "1", fmt(d.constant * d.constant), fmt(recon)});
  for (const auto& [k, h] : d.kernels)
    csv.row({std::to_string(k), std::to_string(h.support_size()),
             fmt(factorial(k) * norm_sq(h)), fmt(recon)});

  if (g.has_out()) {
    for (const auto& [k, h] : d.kernels)
      save_kernel(h, (fs::path(g.out_dir) / ("kernel_" + std::to_string(k) + ".txt"))
                         .string());
    std::ofstream cst((fs::path(g.out_dir) / "constant.txt").string());
    cst << fmt(d.constant) << "\n";
  } else {
    std::cout << "# constant\n" << fmt(d.constant) << "\n";
    for (const auto& [k, h] : d.kernels) {
      std::cout << "# order " << k << "\n";
      save_kernel(h, std::cout);
    }
  }
  return finish(recon <= 1e-9);
}

// ---- subcommand: couple ---------------------------------------------------

struct CoupleArgs {
  std::string kernel_file;
  LawArgs law;
  std::vector<double> ts{0.1, 0.5, 1.0};
  std::vector<double> grid{1e-2, 1e-3, 1e-4};
  long flip_samples = 1000000;
};

int cmd_couple(const Global& g, const CoupleArgs& a) {
  const Kernel f = load_kernel(a.kernel_file);
  const RademacherLaw law = a.law.resolve(f.dim());
  if (law.dim() > g.exact_cap)
    throw ResourceError("couple: law dimension exceeds --exact-cap");

  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("couple"));
  cfg.set("kernel", a.kernel_file);
  cfg.set("law", a.law.describe());
  cfg.set("flip_samples", a.flip_samples);
  {
    std::string s;
    for (double t : a.ts) s += (s.empty() ? "" : ";") + fmt6(t);
    cfg.set("t", s);
    s.clear();
    for (double t : a.grid) s += (s.empty() ? "" : ";") + fmt6(t);
    cfg.set("grid", s);
  }

  CsvSink csv(g, "couple", cfg);
  csv.row({"check", "t", "deviation", "limit", "pass"});
  bool all = true;
  auto emit = [&](const std::string& check, double t, double dev, double limit,
                  bool pass) {
    all = all && pass;
    csv.row({check, fmt6(t), fmt(dev), fmt(limit), pass ? "1" : "0"});
  };

  const HypercubeFunction F = HypercubeFunction::from_kernel(f, law, g.exact_cap);
  for (double t : a.ts) {
    const double mdev = mehler_check(F, t, law);
    emit("mehler", t, mdev, 1e-10, mdev <= 1e-10);
    if (law.dim() <= 10) {
      const ExchangeabilityReport ex = exchangeability_check(f, t, law, 1e-12, 10);
      emit("exchangeability", t, ex.max_asymmetry, 1e-12, ex.pass);
    }
    // per-coordinate flip frequency P(X^t_k = -1, X_k = +1) = (1-e^{-t}) p_k q_k
    double worst = 0.0;
    for (int k = 1; k <= law.dim(); ++k) {
      long hits = 0;
      for (long i = 0; i < a.flip_samples; ++i) {
        CounterRng xr =
            CounterRng::stream(g.seed ^ 0xF11Bull, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(k));
        const bool x_plus = xr.next_unit() < law.p(k);
        std::uint32_t x = x_plus ? (1u << (k - 1)) : 0u;
        const std::uint32_t z =
            couple_sample(x, t, law, g.seed + 1000 + k, static_cast<std::uint64_t>(i));
        if (x_plus && !(z & (1u << (k - 1)))) ++hits;
      }
      const double want = (1.0 - std::exp(-t)) * law.p(k) * law.q(k);
      const double phat = static_cast<double>(hits) / a.flip_samples;
      const double se = std::sqrt(std::max(want * (1.0 - want), 1e-12) /
                                  static_cast<double>(a.flip_samples));
      worst = std::max(worst, std::abs(phat - want) / (3.0 * se));
    }
    emit("flip_frequency_3se", t, worst, 1.0, worst <= 1.0);
  }

  const RegressionReport rr = regression_check(f, law, a.grid, nullptr, g.exact_cap);
  for (const auto& row : rr.rows) {
    emit("regression_a_residual", row.t, row.dist_a, 0.0, true);
    emit("regression_b_residual", row.t, row.dist_b, 0.0, true);
  }
  for (std::size_t i = 0; i + 1 < rr.rows.size(); ++i) {
    const double ra = rr.rows[i].dist_a / rr.rows[i + 1].dist_a;
    const double rb = rr.rows[i].dist_b / rr.rows[i + 1].dist_b;
    emit("regression_rate_a", rr.rows[i + 1].t, std::abs(ra - 10.0), 2.0,
         ra >= 8.0 && ra <= 12.0);
    emit("regression_rate_b", rr.rows[i + 1].t, std::abs(rb - 10.0), 2.0,
         rb >= 8.0 && rb <= 12.0);
  }
  const double rho_rel = std::abs(rr.c_extrapolated - rr.rho) /
                         std::max(1e-12, std::abs(rr.rho));
  emit("regression_c_limit", 0.0, rho_rel, 1e-4, rho_rel <= 1e-4);
  return finish(all);
}

// ---- subcommand: bound ----------------------------------------------------

int cmd_bound_univariate(const Global& g, const std::string& kernel_file,
                         const LawArgs& law_args, long mc_samples) {
  const Kernel f = load_kernel(kernel_file);
  const RademacherLaw law = law_args.resolve(f.dim());
  UnivariateOptions opt;
  opt.exact_cap = g.exact_cap;
  opt.mc_samples = mc_samples;
  opt.seed = g.seed;
  opt.threads = g.threads;
  const BoundReport r = dw_bound_univariate(f, law, opt);

  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("bound univariate"));
  cfg.set("kernel", kernel_file);
  cfg.set("law", law_args.describe());
  cfg.set("mc_samples", mc_samples);

  CsvSink csv(g, "bound_univariate", cfg);
  csv.row({"order", "dim", "second_moment", "fourth_moment", "fourth_moment_mode",
           "fourth_cumulant", "influence", "influence_mode", "lhs_w1", "lhs_mode",
           "rhs", "pass"});
  const std::string mmode = r.exact ? mode_exact() : mode_mc(r.fourth_moment_se);
  const std::string lmode = r.exact ? mode_exact() : mode_mc(r.lhs_se);
  const bool pass = r.lhs <= r.rhs + (r.exact ? 1e-10 : 3.0 * r.lhs_se);
  csv.row({std::to_string(r.order), std::to_string(f.dim()), fmt(r.second_moment),
           fmt(r.fourth_moment), mmode, fmt(r.fourth_cumulant), fmt(r.influence),
           mode_exact(), fmt(r.lhs), lmode, fmt(r.rhs), pass ? "1" : "0"});

  std::ostream& hs = g.has_out() ? std::cout : std::cerr;
  hs << "fourth-moment-influence bound, order " << r.order << ":\n";
  for (const auto& [name, value] : r.constants)
    hs << "  " << name << " = " << fmt(value) << "\n";
  hs << "  |kappa4| = " << fmt(std::abs(r.fourth_cumulant))
     << ", M(f) = " << fmt(r.influence) << "\n"
     << "  W1 " << (r.exact ? "(exact)" : "(mc)") << " = " << fmt(r.lhs)
     << "  <=  rhs = " << fmt(r.rhs) << (pass ? "  [ok]" : "  [VIOLATED]") << "\n";
  return finish(pass);
}

int cmd_bound_multivariate(const Global& g, const std::vector<std::string>& files,
                           const LawArgs& law_args, double m2, double m3,
                           const std::string& sigma_file, long mc_samples) {
  MultivariateInput in;
  int max_dim = 0;
  for (const auto& path : files) {
    in.kernels.push_back(load_kernel(path));
    max_dim = std::max(max_dim, in.kernels.back().dim());
  }
  in.law = law_args.resolve(max_dim);
  in.m2 = m2;
  in.m3 = m3;
  if (!sigma_file.empty())
    in.target_cov = load_matrix(sigma_file, static_cast<int>(files.size()));

  MultivariateOptions opt;
  opt.exact_cap = g.exact_cap;
  opt.mc_samples = mc_samples;
  opt.seed = g.seed;
  opt.threads = g.threads;
  const MultivariateReport r = multivariate_bound(in, opt);
  const int d = static_cast<int>(files.size());

  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("bound multivariate"));
  for (int i = 0; i < d; ++i) cfg.set("kernel_" + std::to_string(i + 1), files[i]);
  cfg.set("law", law_args.describe());
  cfg.set("m2", m2);
  cfg.set("m3", m3);
  cfg.set("mc_samples", mc_samples);

  CsvSink csv(g, "bound_multivariate", cfg);
  std::vector<std::string> head{"d", "lambda_inv_op", "e_s_norm", "e_s_norm_mode",
                                "trace_term", "term1", "term2", "rhs"};
  for (int i = 0; i < d; ++i) head.push_back("rho_" + std::to_string(i + 1));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      head.push_back("var_gamma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      head.push_back("cov_sq_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  csv.row(head);
  std::vector<std::string> row{std::to_string(d), fmt(r.lambda_inv_op),
                               fmt(r.e_s_norm),
                               r.exact ? mode_exact() : mode_mc(r.e_s_norm_se),
                               fmt(r.trace_term), fmt(r.term1), fmt(r.term2),
                               fmt(r.rhs)};
  for (int i = 0; i < d; ++i) row.push_back(fmt(r.rho[i]));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) row.push_back(fmt(r.var_gamma[i][j]));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) row.push_back(fmt(r.cov_sq_terms[i][j]));
  csv.row(row);

  std::ostream& hs = g.has_out() ? std::cout : std::cerr;
  hs << "multivariate smooth-test bound, d = " << d << ": rhs = " << fmt(r.rhs)
     << " (term1 = " << fmt(r.term1) << ", term2 = " << fmt(r.term2) << ")\n";
  return 0;
}

// ---- subcommand: counterexample --------------------------------------------

int cmd_counterexample(const Global& g, int q, const std::vector<int>& n_list,
                       long samples) {
  if (q < 2) throw InputError("counterexample: q must be >= 2");
  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("counterexample"));
  cfg.set("q", static_cast<long>(q));
  cfg.set("samples", samples);
  {
    std::string s;
    for (int n : n_list) s += (s.empty() ? "" : ";") + std::to_string(n);
    cfg.set("n_list", s);
  }

  CsvSink csv(g, "counterexample", cfg);
  csv.row({"q", "N", "influence", "influence_mode", "m2_rademacher", "m2_mode",
           "m4_rademacher", "m4_mode", "w1_rademacher", "w1_mode", "m2_gaussian",
           "m2g_mode", "m4_gaussian", "m4g_mode", "w1_gaussian", "w1g_mode"});
  for (int n : n_list) {
    const Kernel f = make_counterexample_kernel(q, n);
    const double infl = max_influence(f);

    const auto rad = sample_Q(
        f, SamplerSpec::rademacher(RademacherLaw::symmetric(n), g.seed), samples,
        g.threads);
    const MomentStats rs = sample_moments(rad);
    const W1Estimate rw = w1_mc_vs_gaussian(rad, g.seed ^ 0x1111ull);

    const auto gau =
        sample_Q(f, SamplerSpec::gaussian(g.seed ^ 0x2222ull), samples, g.threads);
    const MomentStats gs = sample_moments(gau);
    const W1Estimate gw = w1_mc_vs_gaussian(gau, g.seed ^ 0x3333ull);

    csv.row({std::to_string(q), std::to_string(n), fmt(infl), mode_exact(),
             fmt(rs.m2), mode_mc(rs.se_m2), fmt(rs.m4), mode_mc(rs.se_m4),
             fmt(rw.value), mode_mc(rw.se), fmt(gs.m2), mode_mc(gs.se_m2),
             fmt(gs.m4), mode_mc(gs.se_m4), fmt(gw.value), mode_mc(gw.se)});
  }
  return 0;
}

// ---- subcommand: dejong ------------------------------------------------------

Kernel dejong_kernel(const std::string& generator, int d, int n, std::uint64_t seed) {
  if (generator == "full") return make_full_support_kernel(d, n);
  if (generator == "sparse") {
    // random sparse kernel with a per-coordinate degree cap, so no coordinate
    // carries a macroscopic share of the norm
    CounterRng rng = CounterRng::stream(seed, 0xDE04ull + n);
    Kernel f(d, n);
    std::vector<int> degree(n + 1, 0);
    const int target = 3 * n;
    int guard = 0;
    int placed = 0;
    while (placed < target && guard < 50 * target) {
      ++guard;
      IndexTuple key;
      while (static_cast<int>(key.size()) < d) {
        int c = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        if (std::find(key.begin(), key.end(), c) == key.end()) key.push_back(c);
      }
      std::sort(key.begin(), key.end());
      bool ok = true;
      for (int c : key) ok = ok && degree[c] < 6;
      if (!ok || f.coeff(key) != 0.0) continue;
      for (int c : key) ++degree[c];
      f.set(key, rng.next_gaussian());
      ++placed;
    }
    return normalize_variance(f);
  }
  throw InputError("dejong: unknown generator '" + generator + "' (full|sparse)");
}

int cmd_dejong(const Global& g, const std::string& generator, int order,
               const std::vector<int>& n_list, const std::vector<std::string>& xis,
               long samples) {
  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("dejong"));
  cfg.set("generator", generator);
  cfg.set("order", static_cast<long>(order));
  cfg.set("samples", samples);
  {
    std::string s;
    for (int n : n_list) s += (s.empty() ? "" : ";") + std::to_string(n);
    cfg.set("n_list", s);
    s.clear();
    for (const auto& x : xis) s += (s.empty() ? "" : ";") + x;
    cfg.set("xi", s);
  }

  CsvSink csv(g, "dejong", cfg);
  csv.row({"generator", "order", "N", "xi", "influence", "influence_mode", "m2",
           "m2_mode", "kappa4", "kappa4_mode", "w1", "w1_mode"});
  for (int n : n_list) {
    const Kernel f = dejong_kernel(generator, order, n, g.seed);
    const double infl = max_influence(f);
    for (const auto& xi : xis) {
      SamplerSpec spec = SamplerSpec::gaussian(g.seed ^ (0xD1ull * (n + 1)));
      if (xi == "rademacher")
        spec = SamplerSpec::rademacher(RademacherLaw::symmetric(n),
                                       g.seed ^ (0xD2ull * (n + 1)));
      else if (xi == "usparse3")
        spec = SamplerSpec::custom(DiscreteDist::sparse_uniform3(),
                                   g.seed ^ (0xD3ull * (n + 1)));
      else if (xi != "gaussian")
        throw InputError("dejong: unknown xi '" + xi +
                         "' (rademacher|gaussian|usparse3)");
      const auto xs = sample_Q(f, spec, samples, g.threads);
      const MomentStats st = sample_moments(xs);
      const W1Estimate w1 = w1_mc_vs_gaussian(xs, g.seed ^ (0xD4ull * (n + 1)));
      const double kappa4 = st.m4 - 3.0 * st.m2 * st.m2;
      const double kappa4_se =
          std::sqrt(st.se_m4 * st.se_m4 + 36.0 * st.m2 * st.m2 * st.se_m2 * st.se_m2);
      csv.row({generator, std::to_string(order), std::to_string(n), xi, fmt(infl),
               mode_exact(), fmt(st.m2), mode_mc(st.se_m2), fmt(kappa4),
               mode_mc(kappa4_se), fmt(w1.value), mode_mc(w1.se)});
    }
  }
  return 0;
}

// ---- subcommand: multivariate ------------------------------------------------

// Built-in influence-vanishing sweep: F = (Q_1(h_n), Q_2(f_n)) with h_n the
// uniform first-order kernel and f_n the perfect-matching kernel, Sigma = I,
// test function g(x) = cos(x_1) cos(x_2) with M2 = M3 = 1.
int cmd_multivariate(const Global& g, const std::vector<int>& n_list, long samples) {
  Config cfg;
  cfg.set_global(g);
  cfg.set("command", std::string("multivariate"));
  cfg.set("samples", samples);
  {
    std::string s;
    for (int n : n_list) s += (s.empty() ? "" : ";") + std::to_string(n);
    cfg.set("n_list", s);
  }

  // E[g(Z)] for Z ~ N(0, I_2) via Gauss-Hermite; closed form is e^{-1}.
  const Matrix identity{{1.0, 0.0}, {0.0, 1.0}};
  const double eg_z = gaussian_expectation(
      [](const std::vector<double>& z) { return std::cos(z[0]) * std::cos(z[1]); },
      identity, 32);

  CsvSink csv(g, "multivariate", cfg);
  csv.row({"n", "sigma_11", "sigma_12", "sigma_22", "sigma_mode", "kappa4_1",
           "kappa4_1_mode", "kappa4_2", "kappa4_2_mode", "influence_1",
           "influence_2", "influence_mode", "var_gamma_11", "var_gamma_12",
           "var_gamma_22", "var_gamma_mode", "smooth_test_rhs", "smooth_test_rhs_mode",
           "eg_z", "eg_f", "discrepancy", "discrepancy_mode"});

  bool all = true;
  for (int n : n_list) {
    if (n < 2 || n % 2 != 0)
      throw InputError("multivariate: sweep sizes must be even and >= 2");
    MultivariateInput in;
    in.kernels = {make_uniform_first_order(n), make_matching_kernel(n)};
    in.law = RademacherLaw::symmetric(n);
    in.target_cov = identity;

    MultivariateOptions opt;
    opt.exact_cap = g.exact_cap;
    opt.mc_samples = samples;
    opt.seed = g.seed ^ (0xABCDull * (n + 1));
    opt.threads = g.threads;
    const MultivariateReport rep = multivariate_bound(in, opt);

    // per-component fourth cumulants via the kernel route (exact)
    const ChaosDecomposition sq1 = multiply_symmetric(in.kernels[0], in.kernels[0]);
    const ChaosDecomposition sq2 = multiply_symmetric(in.kernels[1], in.kernels[1]);
    const double kappa4_1 = expect_product(sq1, sq1) - 3.0;
    const double kappa4_2 = expect_product(sq2, sq2) - 3.0;

    // first-chaos formula must agree with the kernel route (and enumeration
    // when within the cap)
    const FirstChaosReport fc = first_chaos_exact(in.kernels[0], in.law, g.exact_cap);
    const double fc_dev = std::abs(fc.fourth_moment_formula - (kappa4_1 + 3.0));
    all = all && fc_dev <= 1e-10;
    if (fc.fourth_moment_enum)
      all = all && std::abs(*fc.fourth_moment_enum - fc.fourth_moment_formula) <= 1e-10;

    // smooth-test discrepancy
    double eg_f = 0.0, eg_se = 0.0;
    const bool exact_disc = n <= g.exact_cap;
    if (exact_disc) {
      const HypercubeFunction f1 =
          HypercubeFunction::from_kernel(in.kernels[0], in.law, g.exact_cap);
      const HypercubeFunction f2 =
          HypercubeFunction::from_kernel(in.kernels[1], in.law, g.exact_cap);
      HypercubeFunction gt(n, 0.0);
      for (std::uint32_t m = 0; m < gt.atoms(); ++m)
        gt[m] = std::cos(f1[m]) * std::cos(f2[m]);
      eg_f = expect_exact(gt, in.law);
    } else {
      const int n_chunks = static_cast<int>((samples + 16383) / 16384);
      std::vector<double> cs(n_chunks, 0.0), cq(n_chunks, 0.0);
      const Kernel& h = in.kernels[0];
      const Kernel& f = in.kernels[1];
      parallel_chunks(samples, 16384, g.threads, [&](int c, long b, long e) {
        double s1 = 0.0, s2 = 0.0;
        std::vector<double> y(static_cast<std::size_t>(n));
        for (long i = b; i < e; ++i) {
          for (int k = 1; k <= n; ++k) {
            CounterRng rng = CounterRng::stream(opt.seed ^ 0x77ull,
                                                static_cast<std::uint64_t>(i),
                                                static_cast<std::uint64_t>(k));
            y[static_cast<std::size_t>(k - 1)] =
                rng.next_unit() < 0.5 ? -1.0 : 1.0;
          }
          double q1 = 0.0, q2 = 0.0;
          for (const auto& [key, v] : h.entries()) q1 += v * y[key[0] - 1];
          for (const auto& [key, v] : f.entries())
            q2 += 2.0 * v * y[key[0] - 1] * y[key[1] - 1];
          const double val = std::cos(q1) * std::cos(q2);
          s1 += val;
          s2 += val * val;
        }
        cs[c] = s1;
        cq[c] = s2;
      });
      double s1 = 0.0, s2 = 0.0;
      for (int c = 0; c < n_chunks; ++c) {
        s1 += cs[c];
        s2 += cq[c];
      }
      eg_f = s1 / samples;
      eg_se = std::sqrt(std::max(0.0, s2 / samples - eg_f * eg_f) /
                        static_cast<double>(samples));
    }
    const double disc = std::abs(eg_f - eg_z);

    csv.row({std::to_string(n), fmt(rep.sigma[0][0]), fmt(rep.sigma[0][1]),
             fmt(rep.sigma[1][1]), mode_exact(), fmt(kappa4_1), mode_exact(),
             fmt(kappa4_2), mode_exact(), fmt(max_influence(in.kernels[0])),
             fmt(max_influence(in.kernels[1])), mode_exact(),
             fmt(rep.var_gamma[0][0]), fmt(rep.var_gamma[0][1]),
             fmt(rep.var_gamma[1][1]), mode_exact(), fmt(rep.rhs),
             rep.exact ? mode_exact() : mode_mc(rep.e_s_norm_se), fmt(eg_z),
             fmt(eg_f), fmt(disc), exact_disc ? mode_exact() : mode_mc(eg_se)});
  }
  return finish(all);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rademacher chaos toolkit: exact chaos algebra, coupling "
               "diagnostics and normal-approximation bounds"};
  app.require_subcommand(1);
  app.fallthrough(true);  // global flags may follow the subcommand

  Global g;
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for sampling")
      ->capture_default_str();
  app.add_option("--out", g.out_dir, "output directory (CSV + resolved config)");
  app.add_option("--exact-cap", g.exact_cap,
                 "max dimension for exact hypercube enumeration")
      ->capture_default_str();

  // verify
  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run module invariant suites");
  verify->add_option("suite", suite, "algebra|chaos|coupling|bounds|all")
      ->capture_default_str();

  // sample
  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "draw Q_d(f; Xi) samples");
  sample->add_option("--kernel", sa.kernel_file, "kernel file")->required();
  sa.law.attach(sample);
  sample->add_flag("--gaussian", sa.gaussian, "standard gaussian inputs");
  sample->add_option("--custom", sa.custom_table,
                     "custom iid table file (value prob per line)");
  sample->add_option("--samples", sa.samples, "number of draws")
      ->capture_default_str();
  sample->add_flag("--binary", sa.binary, "binary little-endian 64-bit output");

  // decompose
  std::string function_file;
  double prune_eps = 1e-15;
  LawArgs dec_law;
  auto* dec = app.add_subcommand("decompose", "Walsh decomposition of a value table");
  dec->add_option("--function", function_file, "hypercube table file")->required();
  dec_law.attach(dec);
  dec->add_option("--prune", prune_eps, "coefficient prune threshold")
      ->capture_default_str();

  // couple
  CoupleArgs ca;
  auto* couple = app.add_subcommand("couple", "coupling and regression diagnostics");
  couple->add_option("--kernel", ca.kernel_file, "kernel file")->required();
  ca.law.attach(couple);
  couple->add_option("--t", ca.ts, "coupling times")->delimiter(',');
  couple->add_option("--grid", ca.grid, "regression t-grid")->delimiter(',');
  couple->add_option("--flip-samples", ca.flip_samples,
                     "samples for the flip-frequency check")
      ->capture_default_str();

  // bound
  auto* bound = app.add_subcommand("bound", "normal-approximation bounds");
  bound->require_subcommand(1);
  bound->fallthrough(true);
  std::string bu_kernel;
  LawArgs bu_law;
  long bu_mc = 1000000;
  auto* bu = bound->add_subcommand("univariate", "fourth-moment-influence bound");
  bu->add_option("--kernel", bu_kernel, "kernel file")->required();
  bu_law.attach(bu);
  bu->add_option("--mc-samples", bu_mc, "samples beyond the exact cap")
      ->capture_default_str();

  std::vector<std::string> bm_files;
  LawArgs bm_law;
  double bm_m2 = 1.0, bm_m3 = 1.0;
  std::string bm_sigma;
  long bm_mc = 200000;
  auto* bm = bound->add_subcommand("multivariate", "smooth-test vector bound");
  bm->add_option("--kernels", bm_files, "kernel files, orders nondecreasing")
      ->required()
      ->expected(-1);
  bm_law.attach(bm);
  bm->add_option("--m2", bm_m2, "sup ||D^2 g||_op")->capture_default_str();
  bm->add_option("--m3", bm_m3, "sup ||D^3 g||_op")->capture_default_str();
  bm->add_option("--sigma", bm_sigma, "target covariance file (d x d numbers)");
  bm->add_option("--mc-samples", bm_mc, "samples beyond the exact cap")
      ->capture_default_str();

  // counterexample
  int ce_q = 2;
  std::vector<int> ce_ns{16, 64, 256, 1024, 5000};
  long ce_samples = 1000000;
  auto* ce = app.add_subcommand("counterexample",
                                "bounded-influence kernel: gaussian inputs stay "
                                "non-normal, rademacher inputs normalise");
  ce->add_option("--q", ce_q, "kernel order (>= 2)")->capture_default_str();
  ce->add_option("--n-list", ce_ns, "sweep sizes")->delimiter(',');
  ce->add_option("--samples", ce_samples, "Monte Carlo draws per point")
      ->capture_default_str();

  // dejong
  std::string dj_gen = "full";
  int dj_order = 2;
  std::vector<int> dj_ns{16, 64, 256, 1024};
  std::vector<std::string> dj_xis{"rademacher", "gaussian", "usparse3"};
  long dj_samples = 200000;
  auto* dj = app.add_subcommand("dejong",
                                "vanishing-influence sweeps: fourth cumulant and "
                                "W1 decay together");
  dj->add_option("--generator", dj_gen, "full|sparse")->capture_default_str();
  dj->add_option("--order", dj_order, "kernel order")->capture_default_str();
  dj->add_option("--n-list", dj_ns, "sweep sizes")->delimiter(',');
  dj->add_option("--xi", dj_xis, "input laws: rademacher|gaussian|usparse3")
      ->delimiter(',');
  dj->add_option("--samples", dj_samples, "Monte Carlo draws per point")
      ->capture_default_str();

  // multivariate
  std::vector<int> mv_ns{16, 64, 256, 1024};
  long mv_samples = 400000;
  auto* mv = app.add_subcommand("multivariate",
                                "built-in two-component convergence sweep");
  mv->add_option("--n-list", mv_ns, "sweep sizes (even)")->delimiter(',');
  mv->add_option("--samples", mv_samples, "Monte Carlo draws per point")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) return cmd_verify(g, suite);
    if (*sample) return cmd_sample(g, sa);
    if (*dec) return cmd_decompose(g, function_file, dec_law, prune_eps);
    if (*couple) return cmd_couple(g, ca);
    if (*bu) return cmd_bound_univariate(g, bu_kernel, bu_law, bu_mc);
    if (*bm)
      return cmd_bound_multivariate(g, bm_files, bm_law, bm_m2, bm_m3, bm_sigma,
                                    bm_mc);
    if (*ce) return cmd_counterexample(g, ce_q, ce_ns, ce_samples);
    if (*dj) return cmd_dejong(g, dj_gen, dj_order, dj_ns, dj_xis, dj_samples);
    if (*mv) return cmd_multivariate(g, mv_ns, mv_samples);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
