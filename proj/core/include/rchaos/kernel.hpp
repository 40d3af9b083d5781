#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rchaos/errors.hpp"
#include "rchaos/rng.hpp"

namespace rchaos {

/// 1-based coordinate indices.
using IndexTuple = std::vector<int>;

/// Symmetric off-diagonal kernel on {1..dim}^order.
///
/// Canonical storage keeps one coefficient per strictly increasing index
/// tuple; the represented function takes that value on all order! index
/// permutations and vanishes whenever two indices coincide. Symmetry is
/// therefore structural, never checked.
class Kernel {
 public:
  Kernel(int order, int dim);

  int order() const { return order_; }
  int dim() const { return dim_; }

  /// Full symmetric off-diagonal extension: 0 on diagonal tuples and
  /// unstored keys; throws InputError on wrong length or range.
  double value_at(std::span<const int> idx) const;

  /// Coefficient of a stored strictly increasing key (0 if absent).
  double coeff(const IndexTuple& key) const;

  /// Stores value on the sorted version of idx; indices must be distinct
  /// and within range.
  void set(IndexTuple idx, double value);
  void add(IndexTuple idx, double value);

  const std::map<IndexTuple, double>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  Kernel& scale(double c);
  Kernel& add_scaled(const Kernel& other, double c);

  /// Drops entries with |value| < eps.
  Kernel& prune(double eps = 1e-15);

  /// Sorted list of coordinates appearing in some key.
  std::vector<int> active_coordinates() const;

 private:
  int order_;
  int dim_;
  std::map<IndexTuple, double> entries_;
};

/// Intermediate table holding possibly non-symmetric, possibly
/// diagonal-supported coefficients on arbitrary ordered index tuples
/// (e.g. a contraction f (x)_r g before symmetrisation). Order 0 tables
/// hold a single scalar under the empty tuple.
class RawTable {
 public:
  RawTable(int order, int dim);

  int order() const { return order_; }
  int dim() const { return dim_; }

  double value_at(std::span<const int> idx) const;
  void set(IndexTuple idx, double value);
  void add(IndexTuple idx, double value);

  const std::map<IndexTuple, double>& entries() const { return entries_; }
  double scalar() const;  // order-0 only

 private:
  int order_;
  int dim_;
  std::map<IndexTuple, double> entries_;
};

/// r-contraction (f (x)_r g)(i.., j..) = sum_k f(i.., k..) g(j.., k..),
/// an order p+q-2r table, generally neither symmetric nor off-diagonal.
/// r = 0 is the plain tensor product.
RawTable contract(const Kernel& f, const Kernel& g, int r);

/// Canonical symmetrisation t~(i_1..i_p) = (1/p!) sum_{perm} t(i_s(1)..i_s(p)).
RawTable symmetrize(const RawTable& t);

/// Symmetrised tensor product restricted off-diagonal:
/// f (x)~ g 1_{Delta_{p+q}} as a Kernel of order p+q.
Kernel sym_offdiag_product(const Kernel& f, const Kernel& g);

/// t~ restricted to off-diagonal tuples, as a Kernel (t of any symmetry).
Kernel sym_offdiag_kernel(const RawTable& t);

/// Full ordered-tuple inner product; equals p! * sum over stored keys.
double inner(const Kernel& f, const Kernel& g);
double norm_sq(const Kernel& f);

/// Ordered-tuple sums over the raw table support.
double inner(const RawTable& t, const RawTable& u);
double norm_sq(const RawTable& t);

/// ||t~||^2 and <t~, u~> computed orbit-by-orbit without materialising the
/// symmetrisation; _offdiag variants restrict to tuples with a repeated index.
double sym_norm_sq(const RawTable& t);
double sym_offdiag_norm_sq(const RawTable& t);
double sym_inner_offdiag(const RawTable& t, const RawTable& u);

/// ||f (x)~ g||^2, ||f (x)~ g 1_{Delta^c}||^2 and
/// <f (x)~ g, u (x)~ v 1_{Delta^c}> via multiset grouping of key pairs;
/// never forms the order-(p+q) table.
double sym_tensor_norm_sq(const Kernel& f, const Kernel& g);
double sym_tensor_offdiag_norm_sq(const Kernel& f, const Kernel& g);
double sym_tensor_offdiag_inner(const Kernel& f, const Kernel& g, const Kernel& u,
                                const Kernel& v);

/// Maximal influence: sup_k over ordered-tuple sums of f(i_1..i_{d-1}, k)^2.
double max_influence(const Kernel& f);

/// Counterexample kernel: value 1/(q! sqrt(N-q+1)) on {1,..,q-1,s}, s = q..N.
/// Satisfies q! ||f||^2 = 1 and max_influence = 1/(q q!).
Kernel make_counterexample_kernel(int q, int n);

/// All C(n,d) increasing keys get the same coefficient, normalised so that
/// d! ||f||^2 = 1. Maximal influence 1/(n d!).
Kernel make_full_support_kernel(int d, int n);

/// Perfect-matching kernel (order 2, even n): keys (2i-1, 2i) with equal
/// coefficients, normalised to 2! ||f||^2 = 1. Maximal influence 1/(2n).
Kernel make_matching_kernel(int n);

/// Uniform order-1 kernel h(k) = 1/sqrt(n), unit norm.
Kernel make_uniform_first_order(int n);

/// n_keys distinct random increasing keys with N(0,1) coefficients; when
/// normalize_variance is set, scaled so order! * ||f||^2 = 1.
Kernel random_sparse_kernel(int order, int dim, int n_keys, CounterRng& rng,
                            bool normalize_variance = false);

/// Scales f so that order! * ||f||^2 = 1. Throws InputError on a zero kernel.
Kernel normalize_variance(const Kernel& f);

/// Key-wise equality after dropping entries below `drop`.
bool approx_equal(const Kernel& a, const Kernel& b, double tol,
                  double drop = 1e-15);
double max_coeff_deviation(const Kernel& a, const Kernel& b);

/// Text format: header "order p dim N", then one line per key
/// (increasing indices then the coefficient, 17 significant digits).
void save_kernel(const Kernel& f, std::ostream& os);
void save_kernel(const Kernel& f, const std::string& path);
Kernel load_kernel(std::istream& is);
Kernel load_kernel(const std::string& path);

}  // namespace rchaos
