#pragma once

#include <string>
#include <vector>

#include "rchaos/errors.hpp"

namespace rchaos {

/// Product law of independent signs X_k in {-1,+1} with P(X_k = +1) = p_k,
/// k = 1..N, together with the normalised sequence
/// Y_k = (X_k - p_k + q_k) / (2 sqrt(p_k q_k)).
class RademacherLaw {
 public:
  explicit RademacherLaw(std::vector<double> probs);
  static RademacherLaw symmetric(int n);

  int dim() const { return static_cast<int>(p_.size()); }
  double p(int k) const { return p_[check(k)]; }
  double q(int k) const { return 1.0 - p_[check(k)]; }

  /// Value of Y_k given the sign of X_k: sqrt(q/p) at +1, -sqrt(p/q) at -1.
  double y_plus(int k) const;
  double y_minus(int k) const;
  double normalized_value(int k, int sign) const;

  bool is_symmetric(double tol = 0.0) const;

  static RademacherLaw load(const std::string& path);
  void save(const std::string& path) const;

 private:
  int check(int k) const {
    if (k < 1 || k > dim()) throw InputError("RademacherLaw: coordinate out of range");
    return k - 1;
  }
  std::vector<double> p_;
};

}  // namespace rchaos
