#pragma once

#include <functional>
#include <vector>

namespace rchaos {

inline constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of normal_cdf on (0,1); accurate to ~1e-14 after Newton polish.
double normal_quantile(double u);

/// Antiderivative of the standard normal CDF, H(x) = x*Phi(x) + phi(x),
/// normalised so H(-inf) = 0. Then integral_a^b Phi = H(b) - H(a) and
/// integral_a^b (1 - Phi) = (b - H(b)) - (a - H(a)).
double normal_cdf_antiderivative(double x);

/// n! as a double (exact for n <= 22).
double factorial(int n);

/// Binomial coefficient C(n, k) as a double.
double binomial(int n, int k);

/// Nodes and weights of n-point Gauss-Hermite quadrature for weight e^{-x^2}.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermite gauss_hermite(int n);

/// E[g(Z)] for Z ~ N(0, Sigma) in d <= 4 dimensions by tensorised
/// Gauss-Hermite quadrature (nodes_per_dim points per axis).
double gaussian_expectation(const std::function<double(const std::vector<double>&)>& g,
                            const std::vector<std::vector<double>>& sigma,
                            int nodes_per_dim = 32);

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi, ascending.
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a);

/// Lower-triangular Cholesky factor; semidefinite inputs tolerated, pivots
/// below `tol` are clamped to zero. Throws InputError if a pivot < -tol.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a,
                                          double tol = 1e-10);

}  // namespace rchaos
