#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mplex/pg.hpp"
#include "mplex/rng.hpp"

using namespace mplex;

namespace {

// E[omega] for omega ~ PG(1, c): tanh(c/2) / (2c), limit 1/4 at c = 0
double pg_mean(double c) {
  if (c == 0.0) return 0.25;
  return std::tanh(c / 2.0) / (2.0 * c);
}

struct Moments {
  double mean, var;
};

Moments draw_moments(double c, int n, uint64_t seed) {
  Rng g(seed);
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double w = pg::sample_pg1(c, g);
    s += w;
    s2 += w * w;
  }
  double m = s / n;
  return {m, (s2 - n * m * m) / (n - 1)};
}

}  // namespace

TEST_CASE("sample mean matches tanh identity at c in {0, 1, 3}") {
  const int n = 100000;
  pg::reset_cap_anomalies();
  uint64_t seed = 1234;
  for (double c : {0.0, 1.0, 3.0}) {
    Moments mo = draw_moments(c, n, seed++);
    double se = std::sqrt(mo.var / n);
    CHECK(std::fabs(mo.mean - pg_mean(c)) < 4.0 * se);
  }
  CHECK(pg::cap_anomalies() == 0);
}

TEST_CASE("variance at c = 0 matches 1/24") {
  // Var PG(1,0) = 1/24; fourth central moment estimated from the sample for
  // the standard error of the variance estimator
  const int n = 100000;
  Rng g(777);
  std::vector<double> w(n);
  double s = 0;
  for (double& x : w) s += (x = pg::sample_pg1(0.0, g));
  double m = s / n;
  double v = 0, m4 = 0;
  for (double x : w) {
    double d = x - m;
    v += d * d;
    m4 += d * d * d * d;
  }
  v /= n - 1;
  m4 /= n;
  double se_var = std::sqrt((m4 - v * v) / n);
  CHECK(std::fabs(v - 1.0 / 24.0) < 4.0 * se_var);
}

TEST_CASE("mean tracks the identity across a c grid") {
  const int n = 20000;
  uint64_t seed = 99;
  for (double c : {-4.0, -1.5, -0.3, 0.1, 0.5, 2.0, 6.0, 12.0}) {
    Moments mo = draw_moments(c, n, seed++);
    double se = std::sqrt(mo.var / n);
    CHECK(std::fabs(mo.mean - pg_mean(c)) < 5.0 * se);
  }
}

TEST_CASE("draws are symmetric in the sign of c") {
  Rng g1(5), g2(5);
  for (int i = 0; i < 200; ++i)
    CHECK(pg::sample_pg1(2.3, g1) == doctest::Approx(pg::sample_pg1(-2.3, g2)).epsilon(1e-15));
}

TEST_CASE("deterministic given the generator state") {
  Rng g1(42), g2(42);
  for (int i = 0; i < 100; ++i) {
    double a = pg::sample_pg1(1.7, g1);
    double b = pg::sample_pg1(1.7, g2);
    CHECK(a == b);
    CHECK(a > 0.0);
  }
}

TEST_CASE("envelope branch probability: proper, decreasing in z") {
  // larger tilt shifts proposal mass to the inverse-Gaussian head
  double prev = 1.0;
  for (double z : {0.0, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    double q = pg::exp_branch_prob(z);
    CHECK(q <= prev);
    CHECK(q >= 0.0);
    prev = q;
  }
  // untilted value from the mass ratio of the two envelope pieces
  CHECK(pg::exp_branch_prob(0.0) == doctest::Approx(0.5777).epsilon(1e-3));
}

TEST_CASE("large c produces small positive draws") {
  Rng g(8);
  for (int i = 0; i < 1000; ++i) {
    double w = pg::sample_pg1(25.0, g);
    CHECK(w > 0.0);
    CHECK(w < 0.25);  // mean is ~tanh(12.5)/50 ~ 0.02; 0.25 is a loose roof
  }
  CHECK(pg::cap_anomalies() == 0);
}
