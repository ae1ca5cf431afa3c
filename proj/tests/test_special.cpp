#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pairmn/errors.hpp"
#include "pairmn/special.hpp"

using namespace pairmn;

TEST_CASE("f_cdf basic values") {
  CHECK(f_cdf(0.0, 4, 10) == 0.0);
  CHECK(f_cdf(-3.0, 4, 10) == 0.0);
  // F(1; d, d) = 1/2 by symmetry of equal-df F around 1
  for (int d : {1, 2, 7, 20, 55}) CHECK(f_cdf(1.0, d, d) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("f_cdf against quadrature oracle and frozen references") {
  struct Case {
    double x;
    int d1, d2;
    double expected;  // scipy.stats.f.cdf, frozen
  };
  const Case cases[] = {
      {3.0, 4, 10, 0.9276767777118597},   {1.0, 7, 7, 0.5000000000000001},
      {0.5, 2, 30, 0.38850429179154533},  {12.3, 1, 1, 0.8231711311740956},
      {2.5, 99, 101, 0.9999966157169234},
  };
  for (const auto& c : cases) {
    const double got = f_cdf(c.x, c.d1, c.d2);
    CHECK(got == doctest::Approx(c.expected).epsilon(1e-11));
    CHECK(std::fabs(got - oracle::f_cdf_quadrature(c.x, c.d1, c.d2)) < 1e-8);
  }
}

TEST_CASE("chisq_cdf basic and frozen values") {
  CHECK(chisq_cdf(0.0, 4) == 0.0);
  // chi-square with 2 df is Exp(1/2)
  CHECK(chisq_cdf(-2.0 * std::log(0.5), 2) == doctest::Approx(0.5).epsilon(1e-13));
  struct Case {
    double x;
    int k;
    double expected;  // scipy.stats.chi2.cdf, frozen
  };
  const Case cases[] = {
      {2.7726, 4, 0.4034283640054166},  {1.0, 1, 0.6826894921370859},
      {27.3, 20, 0.8729672501687591},   {5.0, 2, 0.9179150013761012},
      {120.2, 100, 0.91751487354136},
  };
  for (const auto& c : cases) {
    CHECK(chisq_cdf(c.x, c.k) == doctest::Approx(c.expected).epsilon(1e-11));
    CHECK(std::fabs(chisq_cdf(c.x, c.k) - oracle::chisq_cdf_quadrature(c.x, c.k)) < 1e-8);
  }
}

TEST_CASE("regularized functions frozen spot checks") {
  CHECK(reg_inc_beta(0.3, 2.5, 3.5) == doctest::Approx(0.29675298929566646).epsilon(1e-12));
  CHECK(reg_lower_gamma(3.5, 2.2) == doctest::Approx(0.2672769164361349).epsilon(1e-12));
  CHECK(reg_inc_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(reg_inc_beta(1.0, 2.0, 3.0) == 1.0);
}

TEST_CASE("CDFs are monotone nondecreasing on a 1000-point grid") {
  double prev_f = -1.0, prev_c = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.02 * i;
    const double f = f_cdf(x, 5, 17);
    const double c = chisq_cdf(x, 9);
    CHECK(f >= prev_f);
    CHECK(c >= prev_c);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    prev_f = f;
    prev_c = c;
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(f_cdf(1.0, 0, 5), InvalidInput);
  CHECK_THROWS_AS(chisq_cdf(1.0, 0), InvalidInput);
  CHECK_THROWS_AS(f_cdf(std::nan(""), 2, 2), InvalidInput);
  CHECK_THROWS_AS(reg_inc_beta(0.5, -1.0, 2.0), InvalidInput);
}

TEST_CASE("kolmogorov survival sanity") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(10.0) == doctest::Approx(0.0).epsilon(1e-12));
  // classical table value Q(1.36) ~ 0.049
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.049).epsilon(0.02));
}
