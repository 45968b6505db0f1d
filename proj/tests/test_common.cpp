#include "common.hpp"

#include "doctest.h"

using namespace afa;

TEST_SUITE("common") {

TEST_CASE("relabel_dense maps to first-occurrence order") {
  std::vector<int32_t> v{5, 2, 5, 9};
  CHECK(relabel_dense(v) == 3);
  CHECK(v == std::vector<int32_t>{0, 1, 0, 2});

  std::vector<int32_t> dense{0, 1, 2};
  CHECK(relabel_dense(dense) == 3);
  CHECK(dense == std::vector<int32_t>{0, 1, 2});

  std::vector<int32_t> empty;
  CHECK(relabel_dense(empty) == 0);
}

TEST_CASE("splitmix64 matches the published stream for seed 0") {
  SplitMix64 rng(0);
  CHECK(rng.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("generator streams are deterministic per seed") {
  SplitMix64 a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    uint64_t va = a.next_u64(), vb = b.next_u64(), vc = c.next_u64();
    all_equal = all_equal && (va == vb);
    any_diff = any_diff || (va != vc);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("next_double stays in [0,1) and next_normal has sane moments") {
  SplitMix64 rng(7);
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < n; ++i) {
    double g = rng.next_normal();
    sum += g;
    sumsq += g * g;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("derive_seed separates stages and indices") {
  uint64_t base = 123;
  CHECK(derive_seed(base, "alpha") == derive_seed(base, "alpha"));
  CHECK(derive_seed(base, "alpha") != derive_seed(base, "beta"));
  CHECK(derive_seed(base, "alpha", 0) != derive_seed(base, "alpha", 1));
  CHECK(derive_seed(base, "alpha") != derive_seed(base + 1, "alpha"));
}

TEST_CASE("string utilities") {
  CHECK(split("a,b,,c", ',') ==
        std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split("", ',') == std::vector<std::string>{""});
  CHECK(trim("  x y\t ") == "x y");
  CHECK(trim("") == "");
  CHECK(lower("MiXeD") == "mixed");
}

}  // TEST_SUITE
