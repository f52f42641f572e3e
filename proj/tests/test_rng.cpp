#include <cmath>
#include <vector>

#include <doctest.h>

#include "pclq/errors.hpp"
#include "pclq/rng.hpp"

using pclq::CounterRng;
using pclq::portable_log;

TEST_CASE("identical seeds produce identical streams") {
  CounterRng a(1234);
  CounterRng b(1234);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng ga(77), gb(77);
  for (int i = 0; i < 1000; ++i) CHECK(ga.gaussian() == gb.gaussian());
}

TEST_CASE("split streams are independent of parent consumption") {
  CounterRng parent(5);
  CounterRng child_before = parent.split(3);
  for (int i = 0; i < 10; ++i) parent.next_u64();
  CounterRng child_after = parent.split(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(child_before.next_u64() == child_after.next_u64());
  }
}

TEST_CASE("distinct streams differ") {
  CounterRng parent(5);
  CounterRng a = parent.split(0);
  CounterRng b = parent.split(1);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("uniform01 stays in [0, 1)") {
  CounterRng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian moments at Monte-Carlo accuracy") {
  CounterRng rng(2024);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.gaussian();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);       // ~4.5 sigma
  CHECK(std::abs(var - 1.0) < 0.02);  // ~4.5 sigma for the second moment
}

TEST_CASE("portable_log matches the platform log") {
  const std::vector<double> probes = {1e-300, 2.2e-16, 0.001, 0.3, 0.5,
                                      0.9999, 1.0,     1.5,   2.0, 1e10};
  for (double x : probes) {
    CHECK(portable_log(x) == doctest::Approx(std::log(x)).epsilon(1e-14));
  }
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform01() + 1e-12;
    CHECK(portable_log(x) == doctest::Approx(std::log(x)).epsilon(1e-13));
  }
  CHECK(portable_log(1.0) == 0.0);
  CHECK_THROWS_AS(portable_log(0.0), pclq::Error);
  CHECK_THROWS_AS(portable_log(-1.0), pclq::Error);
}
