#include "rchaos/math.hpp"

#include <cmath>
#include <cstdlib>

#include "rchaos/errors.hpp"
#include "rchaos/rng.hpp"

namespace rchaos {

double CounterRng::next_gaussian() {
  const double u1 = next_unit_pos();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * kPi);
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational initial guess for the probit function.
double quantile_seed(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw InputError("normal_quantile: u must be in (0,1)");
  double x = quantile_seed(u);
  // Two Halley steps push the Acklam seed to near machine precision.
  for (int it = 0; it < 2; ++it) {
    const double e = normal_cdf(x) - u;
    const double f = normal_pdf(x);
    if (f <= 0.0) break;
    const double w = e / f;
    x -= w / (1.0 + 0.5 * x * w);
  }
  return x;
}

double normal_cdf_antiderivative(double x) {
  return x * normal_cdf(x) + normal_pdf(x);
}

double factorial(int n) {
  if (n < 0) throw InputError("factorial: negative argument");
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  // Arguments stay small here, so the product is exact; round to the integer.
  return std::floor(r + 0.5);
}

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw InputError("gauss_hermite: n must be >= 1");
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  const double sqrt_pi = std::sqrt(kPi);
  // Newton iteration on the physicists' Hermite polynomial H_n, seeded with
  // the usual asymptotic guesses, filling roots from the largest down.
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * gh.nodes[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * gh.nodes[n - 2];
    } else {
      z = 2.0 * z - gh.nodes[n - i + 1];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = std::pow(kPi, -0.25);  // orthonormal recurrence
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    gh.nodes[n - 1 - i] = z;
    gh.nodes[i] = -z;
    gh.weights[n - 1 - i] = 2.0 / (pp * pp);
    gh.weights[i] = gh.weights[n - 1 - i];
  }
  if (n % 2 == 1) gh.nodes[n / 2] = 0.0;
  // Normalise total weight to sqrt(pi) exactly (guards the odd middle node).
  double sum = 0.0;
  for (double w : gh.weights) sum += w;
  for (double& w : gh.weights) w *= sqrt_pi / sum;
  return gh;
}

double gaussian_expectation(const std::function<double(const std::vector<double>&)>& g,
                            const std::vector<std::vector<double>>& sigma,
                            int nodes_per_dim) {
  const int d = static_cast<int>(sigma.size());
  if (d < 1 || d > 4) throw InputError("gaussian_expectation: dimension must be 1..4");
  const auto chol = cholesky(sigma);
  const GaussHermite gh = gauss_hermite(nodes_per_dim);
  const double norm = std::pow(kPi, -0.5 * d);
  std::vector<int> idx(d, 0);
  std::vector<double> u(d), z(d);
  double total = 0.0;
  while (true) {
    double w = norm;
    for (int j = 0; j < d; ++j) {
      u[j] = std::sqrt(2.0) * gh.nodes[idx[j]];
      w *= gh.weights[idx[j]];
    }
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j <= i; ++j) s += chol[i][j] * u[j];
      z[i] = s;
    }
    total += w * g(z);
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < nodes_per_dim) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
  return total;
}

std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a,
                                          double tol) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s < -tol) throw InputError("cholesky: matrix is not nonnegative definite");
        l[i][i] = s > tol ? std::sqrt(s) : 0.0;
      } else {
        l[i][j] = l[j][j] > 0.0 ? s / l[j][j] : 0.0;
      }
    }
  }
  return l;
}

}  // namespace rchaos
