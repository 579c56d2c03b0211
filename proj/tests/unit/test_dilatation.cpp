#include <doctest.h>

#include <cmath>
#include <random>

#include "beltrami/coefficients.hpp"
#include "beltrami/dilatation.hpp"
#include "beltrami/errors.hpp"

using namespace beltrami;

TEST_CASE("maximal dilatation") {
  CHECK(maximal_dilatation(0.0, 0.0) == 1.0);
  CHECK(maximal_dilatation(0.3, 0.3) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(std::isinf(maximal_dilatation(0.6, 0.4)));
  CHECK(std::isinf(maximal_dilatation(2.0, 0.0)));
  // sec4 coefficient at w = 0, r = 0.25: mu = 0.6, K = 1/r
  const auto spec = builtin_catalog("paper-example-sec4", {});
  const auto c = spec.evaluate(0.25, 0.0);
  CHECK(maximal_dilatation(c.mu, c.nu) == doctest::Approx(4.0).epsilon(1e-14));
  for (double r : {0.1, 0.4, 0.7})
    for (double w : {0.0, 0.1, 0.2}) {
      const auto v = spec.evaluate(std::polar(r, 1.0), w);
      CHECK(maximal_dilatation(v.mu, v.nu) == doctest::Approx(1.0 / (r + w)).epsilon(1e-12));
    }
}

TEST_CASE("tangential dilatation") {
  CHECK(tangential_dilatation(0.0, 0.0, {0.3, 0.1}, 0.0, 0.7) == doctest::Approx(1.0));
  CHECK_THROWS_AS(tangential_dilatation(0.1, 0.1, 0.5, 0.5, 0.0), DegenerateBase);
  CHECK(std::isinf(tangential_dilatation(0.6, 0.5, 0.5, 0.0, 0.0)));

  SUBCASE("phase2 variant reduces to r + |w|") {
    const auto spec = builtin_catalog("paper-example-sec4-phase2", {});
    for (double phi : {0.0, 0.9, 2.5, 4.0}) {
      const cplx z = std::polar(0.3, phi);
      const auto c = spec.evaluate(z, cplx{0.0, 0.2});
      CHECK(tangential_dilatation(c.mu, c.nu, z, 0.0, 1.234) == doctest::Approx(0.5).epsilon(1e-9));
    }
  }

  SUBCASE("K^T <= K on random samples") {
    std::mt19937_64 rng(20240301);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    for (int k = 0; k < 10000; ++k) {
      const double a = u(rng), b = u(rng) * (1.0 - a) * 0.999;
      const cplx mu = std::polar(a * 0.999, 2.0 * M_PI * u(rng));
      const cplx nu = std::polar(b, 2.0 * M_PI * u(rng));
      const cplx z{4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0};
      const cplx z0{4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0};
      const double K = maximal_dilatation(mu, nu);
      for (int t = 0; t < 64; ++t) {
        const double kt = tangential_dilatation(mu, nu, z, z0, 2.0 * M_PI * t / 64.0);
        if (kt > K * (1.0 + 1e-12)) ++violations;
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("jacobian") {
  CHECK(jacobian(1.0, 0.0) == 1.0);
  CHECK(jacobian(1.0, 0.5) == doctest::Approx(0.75));
  CHECK(jacobian(0.5, 0.5) == 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)};
    CHECK(jacobian(a, b) == doctest::Approx(-jacobian(b, a)));
  }
}

TEST_CASE("map dilatation") {
  CHECK(map_dilatation(0.0, 0.0) == 1.0);
  CHECK(map_dilatation(2.0, 1.0) == doctest::Approx(3.0));
  CHECK(std::isinf(map_dilatation(1.0, 1.0)));
  // f = z + k conj(z): f_z = 1, f_zbar = k
  for (double k : {0.0, 0.1, 0.5, 0.9})
    CHECK(map_dilatation(1.0, k) == doctest::Approx((1.0 + k) / (1.0 - k)).epsilon(1e-15));
}

TEST_CASE("inner dilatation") {
  CHECK(inner_dilatation_p(2.0, 1.0, 2.0) == doctest::Approx(3.0));
  CHECK(inner_dilatation_p(2.0, 1.0, 2.0) == doctest::Approx(map_dilatation(2.0, 1.0)));
  for (double p : {1.0, 1.3, 2.0}) CHECK(inner_dilatation_p(1.0, 0.0, p) == doctest::Approx(1.0));
  CHECK(inner_dilatation_p(2.0, 1.0, 1.5) == doctest::Approx(3.0));
  CHECK(inner_dilatation_p(0.0, 0.0, 1.5) == 1.0);
  CHECK(std::isinf(inner_dilatation_p(1.0, 1.0, 1.5)));

  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  std::size_t mismatches = 0;
  for (int k = 0; k < 10000; ++k) {
    const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)};
    if (std::abs(std::abs(a) - std::abs(b)) < 1e-6) continue;
    const double x = inner_dilatation_p(a, b, 2.0), y = map_dilatation(a, b);
    if (std::abs(x - y) > 1e-12 * std::abs(y)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("effective single coefficient") {
  CHECK(effective_single_coefficient({0.2, 0.1}, 0.0, {0.3, 0.9}) == cplx{0.2, 0.1});
  CHECK(std::abs(effective_single_coefficient(0.2, 0.3, std::polar(1.0, M_PI)) - cplx{-0.1}) < 1e-15);
  CHECK(std::abs(effective_single_coefficient(0.2, 0.3, 1.0)) <= 0.5 + 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const cplx mu = std::polar(0.5 * u(rng), 6.28 * u(rng)), nu = std::polar(0.49 * u(rng), 6.28 * u(rng));
    const cplx e = effective_single_coefficient(mu, nu, std::polar(1.0, 6.28 * u(rng)));
    CHECK(std::abs(e) <= std::abs(mu) + std::abs(nu) + 1e-15);
    CHECK(maximal_dilatation(e, 0.0) <= maximal_dilatation(mu, nu) * (1 + 1e-12));
  }
}

TEST_CASE("rung bound") {
  CHECK(rung_k_bound(2) == doctest::Approx(1.0 / 3.0));
  CHECK(maximal_dilatation(rung_k_bound(8), 0.0) == doctest::Approx(8.0));
}
