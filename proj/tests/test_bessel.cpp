#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "spdc/bessel.hpp"
#include "spdc/error.hpp"

using namespace spdc;

namespace {

// Power series in long double, log-scaled terms: I_l(x) e^{-x}.
double series_oracle(int l, double x) {
  const long double hx = 0.5L * x;
  long double log_term = l * std::log(hx) - std::lgamma(l + 1.0L) - x;
  long double sum = 0.0L;
  for (int k = 0; k < 2000; ++k) {
    const long double term = std::exp(log_term);
    sum += term;
    if (term < 1e-22L * sum) break;
    log_term += 2.0L * std::log(hx) - std::log(k + 1.0L) - std::log(k + l + 1.0L);
  }
  return static_cast<double>(sum);
}

// Large-x expansion e^{-x} I_l(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(l) / x^k.
double asymptotic_oracle(int l, double x) {
  const double mu = 4.0 * l * l;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 8; ++k) {
    term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * x);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

TEST_CASE("scaled bessel special values") {
  CHECK(bessel_i_scaled(0, 0.0) == 1.0);
  CHECK(bessel_i_scaled(1, 0.0) == 0.0);
  CHECK(bessel_i_scaled(5, 0.0) == 0.0);
  CHECK(bessel_i_scaled(0, 100.0) == doctest::Approx(1.0 / std::sqrt(200.0 * std::numbers::pi)).epsilon(5e-3));
  CHECK(bessel_i_scaled(-3, 2.5) == bessel_i_scaled(3, 2.5));
  CHECK_THROWS_AS(bessel_i_scaled(0, -1.0), DomainError);
}

TEST_CASE("scaled bessel against boost") {
  for (double x : {1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 300.0, 500.0}) {
    for (int l : {0, 1, 2, 3, 5, 10, 20, 30, 50, 100}) {
      const double ref = boost::math::cyl_bessel_i(l, x) * std::exp(-x);
      if (ref < 1e-280) continue;
      INFO("l=" << l << " x=" << x);
      CHECK(bessel_i_scaled(l, x) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("scaled bessel against series and asymptotics") {
  for (double x : {0.01, 0.7, 3.0, 12.0, 40.0}) {
    for (int l : {0, 1, 4, 15, 60, 150}) {
      const double ref = series_oracle(l, x);
      if (ref < 1e-290) continue;
      INFO("l=" << l << " x=" << x);
      CHECK(bessel_i_scaled(l, x) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
  for (double x : {2e3, 1e4, 5e4, 1e6}) {
    for (int l : {0, 1, 5, 10}) {
      INFO("l=" << l << " x=" << x);
      CHECK(bessel_i_scaled(l, x) == doctest::Approx(asymptotic_oracle(l, x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("scaled bessel sequence matches single orders") {
  for (double x : {0.0, 0.3, 7.0, 900.0, 2e4}) {
    std::vector<double> seq(41);
    bessel_i_scaled_sequence(x, seq);
    for (int l = 0; l <= 40; ++l) CHECK(seq[l] == doctest::Approx(bessel_i_scaled(l, x)).epsilon(1e-13));
    // e^{-x} (I_0 + 2 sum I_k) = 1 is the normalization of the recurrence.
    if (x < 100.0) {
      double s = seq[0];
      for (int l = 1; l <= 40; ++l) s += 2.0 * seq[l];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  std::vector<double> seq(3);
  CHECK_THROWS_AS(bessel_i_scaled_sequence(-0.5, seq), DomainError);
  CHECK_THROWS_AS(bessel_i_scaled_sequence(NAN, seq), DomainError);
}
