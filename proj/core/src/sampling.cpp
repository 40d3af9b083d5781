#include "rchaos/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "rchaos/math.hpp"

namespace rchaos {

void DiscreteDist::validate(double tol) const {
  if (values.empty() || values.size() != probs.size())
    throw InputError("DiscreteDist: values/probs must be non-empty and equal length");
  double total = 0.0, mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probs[i] < 0.0) throw InputError("DiscreteDist: negative probability");
    total += probs[i];
    mean += probs[i] * values[i];
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    var += probs[i] * values[i] * values[i];
  if (std::abs(total - 1.0) > tol)
    throw InputError("DiscreteDist: probabilities must sum to 1");
  if (std::abs(mean) > tol) throw InputError("DiscreteDist: distribution must be centred");
  if (std::abs(var - 1.0) > tol)
    throw InputError("DiscreteDist: distribution must have unit variance");
}

double DiscreteDist::sample(CounterRng& rng) const {
  double u = rng.next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

DiscreteDist DiscreteDist::sparse_uniform3() {
  DiscreteDist d;
  const double s = std::sqrt(3.0);
  d.values = {-s, 0.0, s};
  d.probs = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  return d;
}

SamplerSpec SamplerSpec::rademacher(RademacherLaw law, std::uint64_t seed) {
  SamplerSpec s;
  s.kind = Kind::RademacherNormalized;
  s.law = std::move(law);
  s.seed = seed;
  return s;
}

SamplerSpec SamplerSpec::gaussian(std::uint64_t seed) {
  SamplerSpec s;
  s.kind = Kind::StandardGaussian;
  s.seed = seed;
  return s;
}

SamplerSpec SamplerSpec::custom(DiscreteDist table, std::uint64_t seed) {
  table.validate();
  SamplerSpec s;
  s.kind = Kind::CustomIid;
  s.table = std::move(table);
  s.seed = seed;
  return s;
}

double SamplerSpec::draw(std::uint64_t sample_index, int coordinate) const {
  CounterRng rng =
      CounterRng::stream(seed, sample_index, static_cast<std::uint64_t>(coordinate));
  switch (kind) {
    case Kind::RademacherNormalized: {
      const bool plus = rng.next_unit() < law.p(coordinate);
      return plus ? law.y_plus(coordinate) : law.y_minus(coordinate);
    }
    case Kind::StandardGaussian:
      return rng.next_gaussian();
    case Kind::CustomIid:
      return table.sample(rng);
  }
  return 0.0;
}

void parallel_chunks(long n, long chunk, int threads,
                     const std::function<void(int, long, long)>& fn) {
  if (n <= 0) return;
  const int n_chunks = static_cast<int>((n + chunk - 1) / chunk);
  threads = std::max(1, std::min<int>(threads, n_chunks));
  if (threads == 1) {
    for (int c = 0; c < n_chunks; ++c)
      fn(c, static_cast<long>(c) * chunk, std::min<long>(n, (static_cast<long>(c) + 1) * chunk));
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
      fn(c, static_cast<long>(c) * chunk,
         std::min<long>(n, (static_cast<long>(c) + 1) * chunk));
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::vector<double> sample_Q(const Kernel& f, const SamplerSpec& spec, long n,
                             int threads) {
  if (n < 1) throw InputError("sample_Q: sample count must be >= 1");
  if (spec.kind == SamplerSpec::Kind::RademacherNormalized &&
      f.dim() > spec.law.dim())
    throw InputError("sample_Q: kernel dim exceeds law dim");

  const std::vector<int> coords = f.active_coordinates();
  std::vector<int> slot(static_cast<std::size_t>(f.dim()) + 1, -1);
  for (std::size_t i = 0; i < coords.size(); ++i) slot[coords[i]] = static_cast<int>(i);
  const double ofact = factorial(f.order());

  std::vector<double> out(static_cast<std::size_t>(n));
  parallel_chunks(n, 16384, threads, [&](int, long begin, long end) {
    std::vector<double> xi(coords.size());
    for (long i = begin; i < end; ++i) {
      for (std::size_t c = 0; c < coords.size(); ++c)
        xi[c] = spec.draw(static_cast<std::uint64_t>(i), coords[c]);
      double sum = 0.0;
      for (const auto& [key, v] : f.entries()) {
        double prod = v;
        for (int k : key) prod *= xi[slot[k]];
        sum += prod;
      }
      out[static_cast<std::size_t>(i)] = ofact * sum;
    }
  });
  return out;
}

MomentStats sample_moments(std::span<const double> xs) {
  MomentStats s;
  s.n = static_cast<long>(xs.size());
  if (s.n == 0) return s;
  double s1 = 0, s2 = 0, s4 = 0, s8 = 0;
  for (double x : xs) {
    const double x2 = x * x;
    s1 += x;
    s2 += x2;
    s4 += x2 * x2;
    s8 += x2 * x2 * x2 * x2;
  }
  const double n = static_cast<double>(s.n);
  s.mean = s1 / n;
  s.m2 = s2 / n;
  s.m4 = s4 / n;
  s.se_m2 = std::sqrt(std::max(0.0, s.m4 - s.m2 * s.m2) / n);
  s.se_m4 = std::sqrt(std::max(0.0, s8 / n - s.m4 * s.m4) / n);
  return s;
}

W1Estimate w1_mc_vs_gaussian(std::vector<double> samples, std::uint64_t seed,
                             int bootstrap) {
  const std::size_t n = samples.size();
  if (n == 0) throw InputError("w1_mc_vs_gaussian: empty sample");
  std::sort(samples.begin(), samples.end());
  std::vector<double> quantiles(n);
  for (std::size_t i = 0; i < n; ++i)
    quantiles[i] = normal_quantile((static_cast<double>(i) + 0.5) / n);

  W1Estimate est;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(samples[i] - quantiles[i]);
  est.value = acc / static_cast<double>(n);

  if (bootstrap > 1) {
    // Poisson bootstrap: multiplicities ~ Poisson(1) keep the sample sorted,
    // so each replicate is a single merge-style pass.
    double bs_sum = 0.0, bs_sq = 0.0;
    for (int b = 0; b < bootstrap; ++b) {
      CounterRng rng = CounterRng::stream(seed, 0xB00Bull + b);
      std::size_t pos = 0;
      double racc = 0.0;
      std::size_t total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        // Poisson(1) via inversion on a short CDF walk.
        double u = rng.next_unit();
        int count = 0;
        double pk = std::exp(-1.0), cdf = pk;
        while (u >= cdf && count < 12) {
          ++count;
          pk /= count;
          cdf += pk;
        }
        for (int c = 0; c < count; ++c) {
          racc += std::abs(samples[i] - quantiles[std::min(pos, n - 1)]);
          ++pos;
          ++total;
        }
      }
      if (total == 0) continue;
      const double w1b = racc / static_cast<double>(total);
      bs_sum += w1b;
      bs_sq += w1b * w1b;
    }
    const double mean = bs_sum / bootstrap;
    est.se = std::sqrt(std::max(0.0, bs_sq / bootstrap - mean * mean));
  }
  return est;
}

}  // namespace rchaos
