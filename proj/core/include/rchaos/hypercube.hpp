#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"

namespace rchaos {

/// Default cap on exact hypercube enumeration (2^24 = 16.7M atoms).
inline constexpr int kDefaultExactCap = 24;

/// Exact value table of a function of the sign vector over all 2^N atoms.
/// Atom encoding: bit k-1 of the mask is set iff x_k = +1.
class HypercubeFunction {
 public:
  explicit HypercubeFunction(int dim, double init = 0.0);
  static HypercubeFunction constant(int dim, double c) {
    return HypercubeFunction(dim, c);
  }

  /// Value table of Q_d(f; Y) built coordinate-by-coordinate (inverse
  /// biased-Walsh butterfly, O(N 2^N)). f.dim <= law.dim required.
  static HypercubeFunction from_kernel(const Kernel& f, const RademacherLaw& law,
                                       int exact_cap = kDefaultExactCap);

  int dim() const { return dim_; }
  std::uint32_t atoms() const { return 1u << dim_; }
  double operator[](std::uint32_t mask) const { return v_[mask]; }
  double& operator[](std::uint32_t mask) { return v_[mask]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  HypercubeFunction& operator+=(const HypercubeFunction& o);
  HypercubeFunction& operator-=(const HypercubeFunction& o);
  HypercubeFunction& operator*=(double c);
  friend HypercubeFunction operator*(const HypercubeFunction& a,
                                     const HypercubeFunction& b);
  friend HypercubeFunction operator-(HypercubeFunction a, const HypercubeFunction& b) {
    a -= b;
    return a;
  }
  friend HypercubeFunction operator+(HypercubeFunction a, const HypercubeFunction& b) {
    a += b;
    return a;
  }

  HypercubeFunction pow(int m) const;
  double max_abs() const;

 private:
  int dim_;
  std::vector<double> v_;
};

/// E[F(X)] = sum_x F(x) prod_k (p_k or q_k): exact weighted enumeration by
/// coordinatewise folding.
double expect_exact(const HypercubeFunction& f, const RademacherLaw& law);

/// E[F G] and Var(F) under the law.
double expect_product(const HypercubeFunction& a, const HypercubeFunction& b,
                      const RademacherLaw& law);
double variance_exact(const HypercubeFunction& f, const RademacherLaw& law);

/// Discrete gradient D_k F = sqrt(p_k q_k) (F at x_k=+1 minus F at x_k=-1);
/// the result does not depend on coordinate k.
HypercubeFunction discrete_gradient(const HypercubeFunction& f, int k,
                                    const RademacherLaw& law);

/// Q_d(f; Y) at a single atom: order! * sum over stored keys of f * prod Y.
double eval_Q(const Kernel& f, std::uint32_t x_mask, const RademacherLaw& law);

/// Sorted atom distribution (values merged within merge_tol) of Q(f; Y).
struct AtomLaw {
  std::vector<double> values;
  std::vector<double> probs;
};
AtomLaw atom_distribution(const Kernel& f, const RademacherLaw& law,
                          int exact_cap = kDefaultExactCap, double merge_tol = 1e-12);

/// Text format: header "dim N", then 2^N values in mask order.
void save_hypercube(const HypercubeFunction& f, const std::string& path);
HypercubeFunction load_hypercube(const std::string& path);

}  // namespace rchaos
