#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spdc/error.hpp"
#include "spdc/grid.hpp"
#include "spdc/model.hpp"

using namespace spdc;

namespace {

// Direct Cartesian evaluation of the amplitude.
double cartesian_amplitude(const SpdcParams& p, double q1, double t1, double q2, double t2) {
  const double sx = q1 * std::cos(t1) + q2 * std::cos(t2);
  const double sy = q1 * std::sin(t1) + q2 * std::sin(t2);
  const double dx = q1 * std::cos(t1) - q2 * std::cos(t2);
  const double dy = q1 * std::sin(t1) - q2 * std::sin(t2);
  return std::exp(-(sx * sx + sy * sy)) *
         phase_matching(p.kind, p.phase_coefficient() * (dx * dx + dy * dy), p.phi);
}

}  // namespace

TEST_CASE("sinc and phase matching values") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(std::abs(sinc(std::numbers::pi)) < 1e-16);
  CHECK(sinc(1e-6) == doctest::Approx(1.0 - 1e-12 / 6.0).epsilon(1e-15));
  CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-15));
  CHECK(phase_matching(SincMatching{}, 0.0, 0.0) == 1.0);
  CHECK(std::abs(phase_matching(SincMatching{}, std::numbers::pi, 0.0)) < 1e-16);
  CHECK(phase_matching(SincMatching{}, 1.0, -1.0) == 1.0);
  CHECK(phase_matching(SupergaussianMatching{}, 1.0, 0.0) == doctest::Approx(0.824).epsilon(1e-3));
  CHECK(phase_matching(GaussianMatching{}, 2.0, 0.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(phase_matching(RescaledGaussianMatching{0.5}, 2.0, 0.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("gaussian and sinc expansions near zero") {
  for (double u : {1e-5, 1e-4, 1e-3}) {
    // exp(-u) = 1 - u (1 + O(u)); sinc(u) = 1 - u^2 / 6 (1 + O(u^2)).
    const double g = phase_matching(GaussianMatching{}, u, 0.0);
    const double s = phase_matching(SincMatching{}, u, 0.0);
    CHECK(std::abs((1.0 - g) / u - 1.0) < u);
    CHECK(std::abs((1.0 - s) / (u * u / 6.0) - 1.0) < u);
  }
}

TEST_CASE("phase matching kinds parse and print") {
  CHECK(is_sinc(parse_phase_matching("sinc")));
  CHECK(std::holds_alternative<GaussianMatching>(parse_phase_matching("gauss")));
  CHECK(std::get<RescaledGaussianMatching>(parse_phase_matching("rescaled:0.65")).alpha == 0.65);
  CHECK(std::get<SupergaussianMatching>(parse_phase_matching("supergauss")).c == kSupergaussianDefault);
  CHECK(std::get<SupergaussianMatching>(parse_phase_matching("supergauss:0.3")).c == 0.3);
  for (const char* text : {"sinc", "gauss", "rescaled:0.65", "supergauss:0.193"}) {
    CHECK(to_string(parse_phase_matching(text)) ==
          to_string(parse_phase_matching(to_string(parse_phase_matching(text)))));
  }
  CHECK_THROWS_AS(parse_phase_matching("lorentz"), DomainError);
  CHECK_THROWS_AS(parse_phase_matching("rescaled:x"), DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((SpdcParams{0.0}.validate()), DomainError);
  CHECK_THROWS_AS((SpdcParams{-1.0}.validate()), DomainError);
  CHECK_THROWS_AS((SpdcParams{0.1, 1.0, GaussianMatching{}}.validate()), DomainError);
  CHECK_THROWS_AS((SpdcParams{0.1, 0.0, RescaledGaussianMatching{0.0}}.validate()), DomainError);
  CHECK_THROWS_AS((SpdcParams{0.1, 0.0, SupergaussianMatching{-1.0}}.validate()), DomainError);
  CHECK_NOTHROW((SpdcParams{0.1, -4.0, SincMatching{}}.validate()));
  CHECK_THROWS_AS((PhysicalParams{0.0, 1e-4, 4e-7, 1.8}.validate()), DomainError);
}

TEST_CASE("dimensionless parameters from physical inputs") {
  const double length = 2e-3, waist = 230e-6, lambda_p = 413e-9;
  const double k_p = length / (0.0025 * waist * waist);
  const double n = k_p * lambda_p / (2.0 * std::numbers::pi);
  const auto d = derive_dimensionless(PhysicalParams{length, waist, lambda_p, n});
  CHECK(d.b_sigma == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(d.l_r == 2.0 * d.b_sigma * d.b_sigma);
  const auto tiny = derive_dimensionless(PhysicalParams{1e-12, waist, lambda_p, n});
  CHECK(tiny.b_sigma < 1e-5);
  CHECK(PhysicalParams{length, waist, lambda_p, n}.emission_wavelength() == 2.0 * lambda_p);
}

TEST_CASE("amplitude special points") {
  const SpdcParams p{0.05, 0.0};
  const double h = p.phase_coefficient();
  for (double q : {0.5, 3.0, 20.0}) {
    // Back-to-back: pump factor exactly one.
    CHECK(amplitude(p, q, q, std::numbers::pi) == doctest::Approx(sinc(4.0 * h * q * q)).epsilon(1e-14));
  }
  const SpdcParams shifted{0.05, -2.0};
  CHECK(amplitude(shifted, 0.0, 0.0, 0.3) == doctest::Approx(sinc(-2.0)));
  CHECK_THROWS_AS(amplitude(p, -1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("amplitude symmetry and rotation invariance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> radius(0.0, 30.0), angle(-10.0, 10.0), phi(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const SpdcParams p{0.05 + 0.01 * (k % 10), phi(rng)};
    const double q1 = radius(rng), q2 = radius(rng), t1 = angle(rng), t2 = angle(rng);
    const double a = amplitude(p, q1, q2, t1 - t2);
    CHECK(a == doctest::Approx(amplitude(p, q2, q1, t1 - t2)).epsilon(1e-12));
    CHECK(a == doctest::Approx(amplitude(p, q1, q2, t2 - t1)).epsilon(1e-12));
    const double rot = angle(rng);
    CHECK(a == doctest::Approx(cartesian_amplitude(p, q1, t1 + rot, q2, t2 + rot)).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("rings open for negative mismatch") {
  auto argmax_q = [](double phi) {
    const SpdcParams p{0.05, phi};
    double best = -1.0, best_q = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double q = 0.01 * i;
      const double a = amplitude(p, q, q, std::numbers::pi);
      if (a > best) {
        best = a;
        best_q = q;
      }
    }
    return best_q;
  };
  CHECK(argmax_q(-4.0) > 1.0);
  CHECK(argmax_q(0.0) == 0.0);
  CHECK(argmax_q(2.0) == 0.0);
}

TEST_CASE("grid construction") {
  const RadialGrid g(4, 0.5);
  CHECK(g.point(0) == 0.5);
  CHECK(g.q_max() == 2.0);
  CHECK_THROWS_AS(RadialGrid(1, 0.5), DomainError);
  CHECK_THROWS_AS(RadialGrid(4, 0.0), DomainError);
  // Sinc: the diagonal phase argument spans twenty zero spacings.
  const SpdcParams p{0.05, 0.0};
  const double q = default_q_max(p);
  CHECK(4.0 * p.phase_coefficient() * q * q == doctest::Approx(20.0 * std::numbers::pi));
  CHECK(default_q_max(SpdcParams{0.05, -4.0}) > q);
  CHECK(default_q_max(SpdcParams{5.0, 0.0}) == 6.0);
  CHECK(default_grid(p).size() == kDefaultGridPoints);
}
