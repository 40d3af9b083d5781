#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "rchaos/hypercube.hpp"
#include "rchaos/kernel.hpp"
#include "rchaos/law.hpp"
#include "rchaos/rng.hpp"

using namespace rchaos;

TEST_CASE("law file round-trip") {
  const std::string path = "law_test.tmp";
  RademacherLaw law(std::vector<double>{0.1234567890123456, 0.5, 0.99});
  law.save(path);
  const RademacherLaw back = RademacherLaw::load(path);
  REQUIRE(back.dim() == 3);
  for (int k = 1; k <= 3; ++k) CHECK(back.p(k) == law.p(k));
  std::remove(path.c_str());
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS(RademacherLaw(std::vector<double>{0.5, 1.0}), InputError);
  CHECK_THROWS_AS(RademacherLaw(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(RademacherLaw::symmetric(0), InputError);
}

TEST_CASE("kernel file round-trip through a real file") {
  const std::string path = "kernel_test.tmp";
  CounterRng rng = CounterRng::stream(71, 60);
  const Kernel f = random_sparse_kernel(2, 12, 9, rng, true);
  save_kernel(f, path);
  const Kernel back = load_kernel(path);
  CHECK(back.support_size() == f.support_size());
  for (const auto& [k, v] : f.entries()) CHECK(back.coeff(k) == v);
  std::remove(path.c_str());
}

TEST_CASE("hypercube table round-trip") {
  const std::string path = "cube_test.tmp";
  CounterRng rng = CounterRng::stream(73, 61);
  HypercubeFunction F(5, 0.0);
  for (std::uint32_t m = 0; m < F.atoms(); ++m) F[m] = rng.next_range(-4.0, 4.0);
  save_hypercube(F, path);
  const HypercubeFunction back = load_hypercube(path);
  REQUIRE(back.dim() == 5);
  for (std::uint32_t m = 0; m < F.atoms(); ++m) CHECK(back[m] == F[m]);
  std::remove(path.c_str());
}

TEST_CASE("malformed inputs raise input errors") {
  const std::string path = "bad_test.tmp";
  {
    FILE* fp = std::fopen(path.c_str(), "w");
    std::fputs("order x dim 3\n", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(load_kernel(path), InputError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_kernel("does_not_exist.tmp"), InputError);
}
