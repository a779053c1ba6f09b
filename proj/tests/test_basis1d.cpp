#include "oracles.hpp"

#include "hcr/basis1d.hpp"
#include "hcr/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hcr;

TEST_SUITE("basis1d")
{
  TEST_CASE("legendre point values")
  {
    const auto f = Family1D::legendre(5);
    CHECK(f.eval(0, 0.73) == 1.0);
    CHECK(std::abs(f.eval(1, 0.5)) < 1e-15);
    CHECK(f.eval(2, 0.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(f.eval(1, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  }

  TEST_CASE("trig point values")
  {
    const auto f = Family1D::trig(4);
    CHECK(f.eval(1, 0.25) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(f.eval(2, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(f.eval(3, 0.125) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    for (int j = 0; j <= 4; ++j)
      for (double x : { 0.0, 0.1, 0.37, 0.5, 0.99, 1.0 })
        CHECK(std::abs(f.eval(j, x) - oracle::trig(j, x)) < 1e-13);
  }

  TEST_CASE("binary discrete family")
  {
    const auto f = Family1D::discrete(2, 1);
    CHECK(f.eval(1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.eval(1, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.eval(0, 0.0) == 1.0);
  }

  TEST_CASE("discrete family matches an independent Gram-Schmidt")
  {
    for (int v = 2; v <= 7; ++v) {
      const auto f = Family1D::discrete(v, v - 1);
      const auto ref = oracle::gram_schmidt(v, v - 1);
      const auto grid = f.grid();
      REQUIRE(grid.size() == std::size_t(v));
      for (int j = 0; j < v; ++j)
        for (int k = 0; k < v; ++k)
          CHECK(std::abs(f.eval(j, grid[k]) - double(ref[j][k])) < 1e-12);
    }
  }

  TEST_CASE("closed forms and recurrence agree on a dense grid")
  {
    const auto f = Family1D::legendre(12);
    for (int i = 0; i < 1000; ++i) {
      const double x = i / 999.0;
      for (int j = 0; j <= 5; ++j)
        CHECK(std::abs(f.eval(j, x) - oracle::legendre_closed(j, x)) < 1e-12);
      for (int j = 6; j <= 12; ++j)
        CHECK(std::abs(f.eval(j, x) - oracle::legendre_explicit(j, x)) < 1e-9);
    }
  }

  TEST_CASE("orthonormality")
  {
    for (const auto& f : { Family1D::legendre(8), Family1D::trig(8) })
      for (int a = 0; a <= 8; ++a)
        for (int b = 0; b <= 8; ++b)
          CHECK(std::abs(inner_product(f, a, b) - (a == b)) < 1e-10);
    for (int v = 2; v <= 6; ++v) {
      const auto f = Family1D::discrete(v, v - 1);
      for (int a = 0; a < v; ++a)
        for (int b = 0; b < v; ++b)
          CHECK(std::abs(inner_product(f, a, b) - (a == b)) < 1e-12);
    }
    CHECK(std::abs(inner_product(Family1D::discrete(3, 2), 1, 2)) < 1e-12);
  }

  TEST_CASE("orthonormality against Simpson quadrature")
  {
    const auto f = Family1D::legendre(6);
    for (int a = 0; a <= 6; ++a)
      for (int b = 0; b <= 6; ++b) {
        const double s =
          oracle::simpson([&](double x) { return f.eval(a, x) * f.eval(b, x); }, 0, 1, 8000);
        CHECK(std::abs(s - (a == b)) < 1e-9);
      }
  }

  TEST_CASE("zero mean of non-constant functions")
  {
    for (const auto& f : { Family1D::legendre(8), Family1D::trig(8) })
      for (int j = 1; j <= 8; ++j)
        CHECK(std::abs(integrate_moment(f, j, 0)) < 1e-12);
  }

  TEST_CASE("moment integrals")
  {
    const auto leg = Family1D::legendre(6);
    CHECK(integrate_moment(leg, 0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrate_moment(leg, 1, 1) == doctest::Approx(1.0 / (2 * std::sqrt(3.0))).epsilon(1e-14));
    CHECK(std::abs(integrate_moment(leg, 2, 0)) < 1e-15);
    const auto trig = Family1D::trig(6);
    for (const auto* fam : { &leg, &trig })
      for (int j = 0; j <= 6; ++j)
        for (int p = 0; p <= 2; ++p) {
          const double ref = oracle::simpson(
            [&](double x) { return std::pow(x, p) * fam->eval(j, x); }, 0, 1, 4000);
          CHECK(std::abs(integrate_moment(*fam, j, p) - ref) < 1e-10);
        }
  }

  TEST_CASE("derivatives against central differences")
  {
    for (const auto& f : { Family1D::legendre(9), Family1D::trig(6) })
      for (int j = 0; j <= f.max_order(); ++j)
        for (double x : { 0.1, 0.33, 0.5, 0.77, 0.9 }) {
          const double h = 1e-6;
          const double fd = (f.eval(j, x + h) - f.eval(j, x - h)) / (2 * h);
          CHECK(std::abs(f.derivative(j, x) - fd) < 1e-5 * (1 + std::abs(fd)));
        }
  }

  TEST_CASE("eval_all matches eval")
  {
    const auto f = Family1D::legendre(10);
    double out[11];
    f.eval_all(0.271, out);
    for (int j = 0; j <= 10; ++j)
      CHECK(out[j] == doctest::Approx(f.eval(j, 0.271)).epsilon(1e-13));
  }

  TEST_CASE("power coefficients reproduce the closed forms")
  {
    for (int j = 0; j <= 5; ++j) {
      const auto c = legendre_power_coefficients(j);
      for (double x : { 0.0, 0.3, 1.0 }) {
        double s = 0;
        for (std::size_t k = 0; k < c.size(); ++k)
          s += c[k] * std::pow(x, k);
        CHECK(std::abs(s - oracle::legendre_closed(j, x)) < 1e-11);
      }
    }
  }

  TEST_CASE("gauss-legendre integrates polynomials exactly")
  {
    const auto q = gauss_legendre(gauss_legendre_nodes_for_degree(15));
    double s = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      s += q.weights[i] * std::pow(q.nodes[i], 15);
    CHECK(s == doctest::Approx(1.0 / 16).epsilon(1e-14));
  }

  TEST_CASE("invalid arguments")
  {
    const auto f = Family1D::legendre(3);
    CHECK_THROWS_AS(f.eval(4, 0.5), DomainError);
    CHECK_THROWS_AS(f.eval(-1, 0.5), DomainError);
    CHECK_THROWS_AS(f.eval(1, 1.0001), DomainError);
    CHECK_THROWS_AS(f.eval(1, -0.1), DomainError);
    CHECK_THROWS_AS(f.eval(1, std::nan("")), DomainError);
    CHECK_THROWS_AS(Family1D::discrete(3, 3), DomainError);
    CHECK_THROWS_AS(Family1D::discrete(1, 0), DomainError);
    const auto d = Family1D::discrete(3, 2);
    CHECK_THROWS_AS(d.eval(1, 0.25), DomainError);
    CHECK_NOTHROW(d.eval(1, 0.5));
    CHECK_THROWS_AS(integrate_moment(d, 1, 1), DomainError);
    CHECK_THROWS_AS(integrate_moment(f, 1, 3), DomainError);
  }
}
