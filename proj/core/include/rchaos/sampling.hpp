#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"
#include "rchaos/rng.hpp"

namespace rchaos {

/// Finite discrete distribution given by a value/probability table; must be
/// centred with unit variance (validated to 1e-12).
struct DiscreteDist {
  std::vector<double> values;
  std::vector<double> probs;

  void validate(double tol = 1e-12) const;
  double sample(CounterRng& rng) const;

  /// Three-point table {-sqrt(3), 0, +sqrt(3)} with probabilities
  /// {1/6, 2/3, 1/6}: centred, unit variance, fourth moment 3.
  static DiscreteDist sparse_uniform3();
};

/// Input sequence for homogeneous sums Q_d(f; Xi).
struct SamplerSpec {
  enum class Kind { RademacherNormalized, StandardGaussian, CustomIid };

  Kind kind = Kind::RademacherNormalized;
  RademacherLaw law = RademacherLaw::symmetric(1);  // RademacherNormalized only
  DiscreteDist table;                               // CustomIid only
  std::uint64_t seed = 0;

  static SamplerSpec rademacher(RademacherLaw law, std::uint64_t seed);
  static SamplerSpec gaussian(std::uint64_t seed);
  static SamplerSpec custom(DiscreteDist table, std::uint64_t seed);

  /// One coordinate draw; depends only on (seed, sample_index, coordinate).
  double draw(std::uint64_t sample_index, int coordinate) const;
};

/// n i.i.d. draws of Q_d(f; Xi). Cost O(active coordinates + support) per
/// draw; bit-reproducible for any thread count (fixed 16K-sample chunks,
/// counter-derived streams).
std::vector<double> sample_Q(const Kernel& f, const SamplerSpec& spec, long n,
                             int threads = 1);

struct MomentStats {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0, m4 = 0.0;      // raw second/fourth sample moments
  double se_m2 = 0.0, se_m4 = 0.0;
};
MomentStats sample_moments(std::span<const double> xs);

struct W1Estimate {
  double value = 0.0;
  double se = 0.0;  // Poisson-bootstrap standard error
};

/// W1 between the empirical law of the sample and N(0,1): mean of
/// |x_(i) - z_i| against the Gaussian quantile grid z_i = Phi^{-1}((i-1/2)/n).
W1Estimate w1_mc_vs_gaussian(std::vector<double> samples, std::uint64_t seed,
                             int bootstrap = 24);

/// Deterministic fan-out helper: runs fn(chunk_index, begin, end) over fixed
/// [begin,end) ranges of size chunk, on `threads` workers.
void parallel_chunks(long n, long chunk, int threads,
                     const std::function<void(int, long, long)>& fn);

}  // namespace rchaos
