#include "rchaos/hypercube.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rchaos/math.hpp"

namespace rchaos {

namespace {

void require_cap(int dim, int cap, const char* who) {
  if (dim > cap)
    throw ResourceError(std::string(who) + ": dimension " + std::to_string(dim) +
                        " exceeds exact-enumeration cap " + std::to_string(cap));
}

void require_same_dim(int a, int b, const char* who) {
  if (a != b) throw InputError(std::string(who) + ": dimension mismatch");
}

}  // namespace

HypercubeFunction::HypercubeFunction(int dim, double init) : dim_(dim) {
  if (dim < 1) throw InputError("HypercubeFunction: dim must be >= 1");
  if (dim > 30) throw ResourceError("HypercubeFunction: dim > 30 is not supported");
  v_.assign(std::size_t{1} << dim, init);
}

HypercubeFunction HypercubeFunction::from_kernel(const Kernel& f,
                                                 const RademacherLaw& law,
                                                 int exact_cap) {
  if (f.dim() > law.dim())
    throw InputError("HypercubeFunction::from_kernel: kernel dim exceeds law dim");
  require_cap(law.dim(), exact_cap, "HypercubeFunction::from_kernel");
  const int n = law.dim();
  HypercubeFunction out(n, 0.0);
  // Seed multilinear coefficients: coefficient of prod_{k in S} Y_k for the
  // set S of a stored key is order! * f(key).
  const double ofact = factorial(f.order());
  for (const auto& [key, v] : f.entries()) {
    std::uint32_t mask = 0;
    for (int k : key) mask |= 1u << (k - 1);
    out[mask] += ofact * v;
  }
  // Inverse butterfly: expand coefficients into point values coordinatewise.
  for (int k = 1; k <= n; ++k) {
    const std::uint32_t bit = 1u << (k - 1);
    const double yp = law.y_plus(k), ym = law.y_minus(k);
    for (std::uint32_t m = 0; m < out.atoms(); ++m) {
      if (m & bit) continue;
      const double a = out[m];       // coefficient of 1
      const double b = out[m | bit]; // coefficient of Y_k
      out[m] = a + b * ym;           // x_k = -1 atom
      out[m | bit] = a + b * yp;     // x_k = +1 atom
    }
  }
  return out;
}

HypercubeFunction& HypercubeFunction::operator+=(const HypercubeFunction& o) {
  require_same_dim(dim_, o.dim_, "HypercubeFunction::operator+=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

HypercubeFunction& HypercubeFunction::operator-=(const HypercubeFunction& o) {
  require_same_dim(dim_, o.dim_, "HypercubeFunction::operator-=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

HypercubeFunction& HypercubeFunction::operator*=(double c) {
  for (double& x : v_) x *= c;
  return *this;
}

HypercubeFunction operator*(const HypercubeFunction& a, const HypercubeFunction& b) {
  require_same_dim(a.dim_, b.dim_, "HypercubeFunction::operator*");
  HypercubeFunction out(a.dim_, 0.0);
  for (std::size_t i = 0; i < a.v_.size(); ++i) out.v_[i] = a.v_[i] * b.v_[i];
  return out;
}

HypercubeFunction HypercubeFunction::pow(int m) const {
  HypercubeFunction out(dim_, 1.0);
  for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = std::pow(v_[i], m);
  return out;
}

double HypercubeFunction::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double expect_exact(const HypercubeFunction& f, const RademacherLaw& law) {
  require_same_dim(f.dim(), law.dim(), "expect_exact");
  // Fold one coordinate per pass, always the current low bit; after folding
  // coordinate k the compacted table encodes coordinates k+1..N in its low
  // bits, so the buffer halves each pass.
  std::vector<double> work(f.values());
  std::size_t len = work.size();
  for (int k = 1; k <= f.dim(); ++k) {
    const double pk = law.p(k), qk = law.q(k);
    const std::size_t half = len / 2;
    for (std::size_t m = 0; m < half; ++m)
      work[m] = qk * work[2 * m] + pk * work[2 * m + 1];
    len = half;
  }
  return work[0];
}

double expect_product(const HypercubeFunction& a, const HypercubeFunction& b,
                      const RademacherLaw& law) {
  return expect_exact(a * b, law);
}

double variance_exact(const HypercubeFunction& f, const RademacherLaw& law) {
  const double m1 = expect_exact(f, law);
  const double m2 = expect_exact(f * f, law);
  return m2 - m1 * m1;
}

HypercubeFunction discrete_gradient(const HypercubeFunction& f, int k,
                                    const RademacherLaw& law) {
  require_same_dim(f.dim(), law.dim(), "discrete_gradient");
  if (k < 1 || k > f.dim()) throw InputError("discrete_gradient: coordinate out of range");
  const std::uint32_t bit = 1u << (k - 1);
  const double s = std::sqrt(law.p(k) * law.q(k));
  HypercubeFunction out(f.dim(), 0.0);
  for (std::uint32_t m = 0; m < f.atoms(); ++m) {
    const double d = s * (f[m | bit] - f[m & ~bit]);
    out[m] = d;
  }
  return out;
}

double eval_Q(const Kernel& f, std::uint32_t x_mask, const RademacherLaw& law) {
  if (f.dim() > law.dim()) throw InputError("eval_Q: kernel dim exceeds law dim");
  double sum = 0.0;
  for (const auto& [key, v] : f.entries()) {
    double prod = v;
    for (int k : key)
      prod *= (x_mask >> (k - 1)) & 1u ? law.y_plus(k) : law.y_minus(k);
    sum += prod;
  }
  return factorial(f.order()) * sum;
}

AtomLaw atom_distribution(const Kernel& f, const RademacherLaw& law, int exact_cap,
                          double merge_tol) {
  require_cap(law.dim(), exact_cap, "atom_distribution");
  const HypercubeFunction table = HypercubeFunction::from_kernel(f, law, exact_cap);
  std::vector<std::pair<double, double>> atoms;  // (value, prob)
  atoms.reserve(table.atoms());
  for (std::uint32_t m = 0; m < table.atoms(); ++m) {
    double w = 1.0;
    for (int k = 1; k <= law.dim(); ++k)
      w *= (m >> (k - 1)) & 1u ? law.p(k) : law.q(k);
    atoms.emplace_back(table[m], w);
  }
  std::sort(atoms.begin(), atoms.end());
  AtomLaw out;
  for (const auto& [v, w] : atoms) {
    if (!out.values.empty() &&
        std::abs(v - out.values.back()) <= merge_tol * (1.0 + std::abs(v))) {
      out.probs.back() += w;
    } else {
      out.values.push_back(v);
      out.probs.push_back(w);
    }
  }
  return out;
}

void save_hypercube(const HypercubeFunction& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("save_hypercube: cannot open " + path);
  os << "dim " << f.dim() << "\n";
  char buf[64];
  for (std::uint32_t m = 0; m < f.atoms(); ++m) {
    std::snprintf(buf, sizeof(buf), "%.17g", f[m]);
    os << buf << "\n";
  }
}

HypercubeFunction load_hypercube(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("load_hypercube: cannot open " + path);
  std::string word;
  int dim = 0;
  if (!(is >> word) || word != "dim" || !(is >> dim))
    throw InputError("load_hypercube: malformed header (expected 'dim N')");
  HypercubeFunction f(dim, 0.0);
  for (std::uint32_t m = 0; m < f.atoms(); ++m)
    if (!(is >> f[m])) throw InputError("load_hypercube: truncated value table");
  return f;
}

}  // namespace rchaos
