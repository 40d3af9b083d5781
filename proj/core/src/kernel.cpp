#include "rchaos/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rchaos/math.hpp"

namespace rchaos {

namespace {

void check_indices(std::span<const int> idx, int order, int dim, const char* who) {
  if (static_cast<int>(idx.size()) != order)
    throw InputError(std::string(who) + ": tuple length does not match order");
  for (int i : idx)
    if (i < 1 || i > dim)
      throw InputError(std::string(who) + ": index out of range 1..dim");
}

bool has_repeat(const IndexTuple& sorted) {
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

// product of factorials of multiplicities of a sorted tuple
double multiplicity_factor(const IndexTuple& sorted) {
  double prod = 1.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    prod *= factorial(static_cast<int>(j - i));
    i = j;
  }
  return prod;
}

// Groups entries of t by the sorted multiset of their indices:
// M -> sum of t over the distinct arrangements of M present in the support.
std::map<IndexTuple, double> multiset_sums(const RawTable& t) {
  std::map<IndexTuple, double> sums;
  for (const auto& [idx, v] : t.entries()) {
    IndexTuple m = idx;
    std::sort(m.begin(), m.end());
    sums[m] += v;
  }
  return sums;
}

// Same grouping for the tensor product f (x) g without materialising it:
// each key pair (A, B) contributes p! q! f(A) g(B) to the multiset A u B.
std::map<IndexTuple, double> tensor_multiset_sums(const Kernel& f, const Kernel& g) {
  if (f.dim() != g.dim())
    throw InputError("tensor product: dimension mismatch");
  const double pf = factorial(f.order()) * factorial(g.order());
  std::map<IndexTuple, double> sums;
  IndexTuple m;
  for (const auto& [ka, va] : f.entries()) {
    for (const auto& [kb, vb] : g.entries()) {
      m.resize(0);
      m.reserve(ka.size() + kb.size());
      std::merge(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(m));
      sums[m] += pf * va * vb;
    }
  }
  return sums;
}

}  // namespace

Kernel::Kernel(int order, int dim) : order_(order), dim_(dim) {
  if (order < 1) throw InputError("Kernel: order must be positive");
  if (dim < 1) throw InputError("Kernel: dim must be positive");
}

double Kernel::value_at(std::span<const int> idx) const {
  check_indices(idx, order_, dim_, "Kernel::value_at");
  IndexTuple key(idx.begin(), idx.end());
  std::sort(key.begin(), key.end());
  if (has_repeat(key)) return 0.0;  // off-diagonal support
  auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second;
}

double Kernel::coeff(const IndexTuple& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second;
}

void Kernel::set(IndexTuple idx, double value) {
  check_indices(idx, order_, dim_, "Kernel::set");
  std::sort(idx.begin(), idx.end());
  if (has_repeat(idx)) throw InputError("Kernel::set: repeated index in key");
  entries_[std::move(idx)] = value;
}

void Kernel::add(IndexTuple idx, double value) {
  check_indices(idx, order_, dim_, "Kernel::add");
  std::sort(idx.begin(), idx.end());
  if (has_repeat(idx)) throw InputError("Kernel::add: repeated index in key");
  entries_[std::move(idx)] += value;
}

Kernel& Kernel::scale(double c) {
  for (auto& [k, v] : entries_) v *= c;
  return *this;
}

Kernel& Kernel::add_scaled(const Kernel& other, double c) {
  if (other.order_ != order_ || other.dim_ != dim_)
    throw InputError("Kernel::add_scaled: order/dim mismatch");
  for (const auto& [k, v] : other.entries_) entries_[k] += c * v;
  return *this;
}

Kernel& Kernel::prune(double eps) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (std::abs(it->second) < eps)
      it = entries_.erase(it);
    else
      ++it;
  }
  return *this;
}

std::vector<int> Kernel::active_coordinates() const {
  std::vector<int> coords;
  for (const auto& [k, v] : entries_) coords.insert(coords.end(), k.begin(), k.end());
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

RawTable::RawTable(int order, int dim) : order_(order), dim_(dim) {
  if (order < 0) throw InputError("RawTable: order must be >= 0");
  if (dim < 1) throw InputError("RawTable: dim must be positive");
}

double RawTable::value_at(std::span<const int> idx) const {
  check_indices(idx, order_, dim_, "RawTable::value_at");
  IndexTuple key(idx.begin(), idx.end());
  auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second;
}

void RawTable::set(IndexTuple idx, double value) {
  check_indices(idx, order_, dim_, "RawTable::set");
  entries_[std::move(idx)] = value;
}

void RawTable::add(IndexTuple idx, double value) {
  check_indices(idx, order_, dim_, "RawTable::add");
  entries_[std::move(idx)] += value;
}

double RawTable::scalar() const {
  if (order_ != 0) throw InputError("RawTable::scalar: order is not 0");
  auto it = entries_.find(IndexTuple{});
  return it == entries_.end() ? 0.0 : it->second;
}

RawTable contract(const Kernel& f, const Kernel& g, int r) {
  const int p = f.order(), q = g.order();
  if (r < 0 || r > std::min(p, q))
    throw InputError("contract: r out of range 0..min(p,q)");
  if (f.dim() != g.dim()) throw InputError("contract: dimension mismatch");

  // Ordered support split as (head | last r indices), grouped by the tail.
  auto split = [](const Kernel& k, int rr) {
    std::map<IndexTuple, std::vector<std::pair<IndexTuple, double>>> groups;
    const int head_len = k.order() - rr;
    for (const auto& [key, v] : k.entries()) {
      IndexTuple perm = key;
      std::sort(perm.begin(), perm.end());
      do {
        IndexTuple head(perm.begin(), perm.begin() + head_len);
        IndexTuple tail(perm.begin() + head_len, perm.end());
        groups[tail].emplace_back(std::move(head), v);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return groups;
  };

  const auto fg = split(f, r);
  const auto gg = split(g, r);
  RawTable out(p + q - 2 * r, f.dim());
  for (const auto& [tail, heads_f] : fg) {
    auto it = gg.find(tail);
    if (it == gg.end()) continue;
    for (const auto& [ha, va] : heads_f) {
      for (const auto& [hb, vb] : it->second) {
        IndexTuple key = ha;
        key.insert(key.end(), hb.begin(), hb.end());
        out.add(std::move(key), va * vb);
      }
    }
  }
  return out;
}

RawTable symmetrize(const RawTable& t) {
  const int m = t.order();
  RawTable out(m, t.dim());
  const double inv_mfact = 1.0 / factorial(m);
  for (const auto& [mset, s] : multiset_sums(t)) {
    const double value = multiplicity_factor(mset) * inv_mfact * s;
    IndexTuple perm = mset;
    do {
      out.set(perm, value);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

Kernel sym_offdiag_kernel(const RawTable& t) {
  if (t.order() < 1) throw InputError("sym_offdiag_kernel: order must be >= 1");
  Kernel out(t.order(), t.dim());
  const double inv_mfact = 1.0 / factorial(t.order());
  for (const auto& [mset, s] : multiset_sums(t)) {
    if (has_repeat(mset)) continue;
    if (s != 0.0) out.set(mset, s * inv_mfact);
  }
  return out;
}

Kernel sym_offdiag_product(const Kernel& f, const Kernel& g) {
  const int m = f.order() + g.order();
  Kernel out(m, f.dim());
  const double inv_mfact = 1.0 / factorial(m);
  for (const auto& [mset, s] : tensor_multiset_sums(f, g)) {
    if (has_repeat(mset)) continue;
    if (s != 0.0) out.set(mset, s * inv_mfact);
  }
  return out;
}

double inner(const Kernel& f, const Kernel& g) {
  if (f.order() != g.order()) throw InputError("inner: order mismatch");
  if (f.dim() != g.dim()) throw InputError("inner: dimension mismatch");
  const Kernel* a = &f;
  const Kernel* b = &g;
  if (a->support_size() > b->support_size()) std::swap(a, b);
  double s = 0.0;
  for (const auto& [k, v] : a->entries()) s += v * b->coeff(k);
  return factorial(f.order()) * s;
}

double norm_sq(const Kernel& f) {
  double s = 0.0;
  for (const auto& [k, v] : f.entries()) s += v * v;
  return factorial(f.order()) * s;
}

double inner(const RawTable& t, const RawTable& u) {
  if (t.order() != u.order()) throw InputError("inner: order mismatch");
  if (t.dim() != u.dim()) throw InputError("inner: dimension mismatch");
  const auto& small = t.entries().size() <= u.entries().size() ? t : u;
  const auto& big = t.entries().size() <= u.entries().size() ? u : t;
  double s = 0.0;
  for (const auto& [k, v] : small.entries()) {
    auto it = big.entries().find(k);
    if (it != big.entries().end()) s += v * it->second;
  }
  return s;
}

double norm_sq(const RawTable& t) {
  double s = 0.0;
  for (const auto& [k, v] : t.entries()) s += v * v;
  return s;
}

namespace {

double orbit_sum_sq(const std::map<IndexTuple, double>& sums, int order,
                    bool offdiag_only) {
  const double inv_mfact = 1.0 / factorial(order);
  double total = 0.0;
  for (const auto& [mset, s] : sums) {
    if (offdiag_only && !has_repeat(mset)) continue;
    total += multiplicity_factor(mset) * inv_mfact * s * s;
  }
  return total;
}

double orbit_inner(const std::map<IndexTuple, double>& a,
                   const std::map<IndexTuple, double>& b, int order,
                   bool offdiag_only) {
  const double inv_mfact = 1.0 / factorial(order);
  double total = 0.0;
  for (const auto& [mset, s] : a) {
    if (offdiag_only && !has_repeat(mset)) continue;
    auto it = b.find(mset);
    if (it == b.end()) continue;
    total += multiplicity_factor(mset) * inv_mfact * s * it->second;
  }
  return total;
}

}  // namespace

double sym_norm_sq(const RawTable& t) {
  return orbit_sum_sq(multiset_sums(t), t.order(), false);
}

double sym_offdiag_norm_sq(const RawTable& t) {
  return orbit_sum_sq(multiset_sums(t), t.order(), true);
}

double sym_inner_offdiag(const RawTable& t, const RawTable& u) {
  if (t.order() != u.order()) throw InputError("sym_inner_offdiag: order mismatch");
  return orbit_inner(multiset_sums(t), multiset_sums(u), t.order(), true);
}

double sym_tensor_norm_sq(const Kernel& f, const Kernel& g) {
  return orbit_sum_sq(tensor_multiset_sums(f, g), f.order() + g.order(), false);
}

double sym_tensor_offdiag_norm_sq(const Kernel& f, const Kernel& g) {
  return orbit_sum_sq(tensor_multiset_sums(f, g), f.order() + g.order(), true);
}

double sym_tensor_offdiag_inner(const Kernel& f, const Kernel& g, const Kernel& u,
                                const Kernel& v) {
  if (f.order() + g.order() != u.order() + v.order())
    throw InputError("sym_tensor_offdiag_inner: order mismatch");
  return orbit_inner(tensor_multiset_sums(f, g), tensor_multiset_sums(u, v),
                     f.order() + g.order(), true);
}

double max_influence(const Kernel& f) {
  const double rest_fact = factorial(f.order() - 1);
  std::map<int, double> per_coord;
  for (const auto& [key, v] : f.entries())
    for (int k : key) per_coord[k] += v * v;
  double best = 0.0;
  for (const auto& [k, s] : per_coord) best = std::max(best, rest_fact * s);
  return best;
}

Kernel make_counterexample_kernel(int q, int n) {
  if (q < 2) throw InputError("make_counterexample_kernel: q must be >= 2");
  if (n < q) throw InputError("make_counterexample_kernel: N must be >= q");
  Kernel f(q, n);
  const double c = 1.0 / (factorial(q) * std::sqrt(static_cast<double>(n - q + 1)));
  IndexTuple key(q);
  std::iota(key.begin(), key.end(), 1);
  for (int s = q; s <= n; ++s) {
    key[q - 1] = s;
    f.set(key, c);
  }
  return f;
}

Kernel make_full_support_kernel(int d, int n) {
  if (d < 1 || n < d) throw InputError("make_full_support_kernel: need n >= d >= 1");
  const double n_keys = binomial(n, d);
  if (n_keys > 4e6) throw InputError("make_full_support_kernel: support too large");
  Kernel f(d, n);
  const double c = 1.0 / (factorial(d) * std::sqrt(n_keys));
  IndexTuple key(d);
  std::iota(key.begin(), key.end(), 1);
  while (true) {
    f.set(key, c);
    int i = d - 1;
    while (i >= 0 && key[i] == n - (d - 1 - i)) --i;
    if (i < 0) break;
    ++key[i];
    for (int j = i + 1; j < d; ++j) key[j] = key[j - 1] + 1;
  }
  return f;
}

Kernel make_matching_kernel(int n) {
  if (n < 2 || n % 2 != 0) throw InputError("make_matching_kernel: n must be even >= 2");
  Kernel f(2, n);
  const double c = 1.0 / std::sqrt(2.0 * n);
  for (int i = 1; i <= n / 2; ++i) f.set({2 * i - 1, 2 * i}, c);
  return f;
}

Kernel make_uniform_first_order(int n) {
  Kernel h(1, n);
  const double c = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 1; k <= n; ++k) h.set({k}, c);
  return h;
}

Kernel random_sparse_kernel(int order, int dim, int n_keys, CounterRng& rng,
                            bool normalize) {
  Kernel f(order, dim);
  const double capacity = binomial(dim, order);
  n_keys = static_cast<int>(std::min<double>(n_keys, capacity));
  int placed = 0;
  int guard = 0;
  while (placed < n_keys && guard < 100000) {
    ++guard;
    IndexTuple key;
    key.reserve(order);
    while (static_cast<int>(key.size()) < order) {
      int c = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(dim)));
      if (std::find(key.begin(), key.end(), c) == key.end()) key.push_back(c);
    }
    std::sort(key.begin(), key.end());
    if (f.coeff(key) != 0.0) continue;
    f.set(key, rng.next_gaussian());
    ++placed;
  }
  return normalize ? normalize_variance(f) : f;
}

Kernel normalize_variance(const Kernel& f) {
  const double v = factorial(f.order()) * norm_sq(f);
  if (v <= 0.0) throw InputError("normalize_variance: zero kernel");
  Kernel out = f;
  out.scale(1.0 / std::sqrt(v));
  return out;
}

bool approx_equal(const Kernel& a, const Kernel& b, double tol, double drop) {
  if (a.order() != b.order() || a.dim() != b.dim()) return false;
  auto check = [&](const Kernel& x, const Kernel& y) {
    for (const auto& [k, v] : x.entries()) {
      if (std::abs(v) < drop) continue;
      if (std::abs(v - y.coeff(k)) > tol) return false;
    }
    return true;
  };
  return check(a, b) && check(b, a);
}

double max_coeff_deviation(const Kernel& a, const Kernel& b) {
  double dev = 0.0;
  for (const auto& [k, v] : a.entries()) dev = std::max(dev, std::abs(v - b.coeff(k)));
  for (const auto& [k, v] : b.entries()) dev = std::max(dev, std::abs(v - a.coeff(k)));
  return dev;
}

void save_kernel(const Kernel& f, std::ostream& os) {
  os << "order " << f.order() << " dim " << f.dim() << "\n";
  char buf[64];
  for (const auto& [key, v] : f.entries()) {
    for (int i : key) os << i << ' ';
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf << "\n";
  }
}

void save_kernel(const Kernel& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("save_kernel: cannot open " + path);
  save_kernel(f, os);
}

Kernel load_kernel(std::istream& is) {
  std::string word;
  int order = 0, dim = 0;
  if (!(is >> word) || word != "order" || !(is >> order) || !(is >> word) ||
      word != "dim" || !(is >> dim))
    throw InputError("load_kernel: malformed header (expected 'order p dim N')");
  Kernel f(order, dim);
  std::string line;
  std::getline(is, line);  // rest of header line
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    IndexTuple key(order);
    for (int i = 0; i < order; ++i)
      if (!(ls >> key[i])) throw InputError("load_kernel: truncated key line");
    double v;
    if (!(ls >> v)) throw InputError("load_kernel: missing coefficient");
    f.set(std::move(key), v);
  }
  return f;
}

Kernel load_kernel(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("load_kernel: cannot open " + path);
  return load_kernel(is);
}

}  // namespace rchaos
