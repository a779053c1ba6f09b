#include "oracles.hpp"

#include "hcr/errors.hpp"
#include "hcr/tensor_basis.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace hcr;

namespace {

std::vector<Family1D>
legendre_families(std::size_t d, int m)
{
  return std::vector<Family1D>(d, Family1D::legendre(m));
}

std::size_t
count_level(const BasisSpec& spec, std::size_t level)
{
  return std::count_if(spec.selected().begin(), spec.selected().end(),
                       [&](const MultiIndex& j) { return j.level() == level; });
}

// Brute force over {0..m}^d, independent of the library's enumerator.
std::size_t
enumerate_full(std::size_t d, const std::vector<int>& level_orders)
{
  const int m = *std::max_element(level_orders.begin(), level_orders.end());
  std::size_t total = 0;
  std::vector<int> j(d, 0);
  for (;;) {
    std::size_t level = 0;
    int top = 0;
    for (int o : j) {
      level += o > 0;
      top = std::max(top, o);
    }
    if (level == 0 || top <= level_orders[level])
      ++total;
    std::size_t i = 0;
    while (i < d && ++j[i] > m)
      j[i++] = 0;
    if (i == d)
      break;
  }
  return total;
}

} // namespace

TEST_SUITE("tensor_basis")
{
  TEST_CASE("full basis, two coordinates, order two")
  {
    const auto spec = build_full(legendre_families(2, 2), { 0, 2, 2 });
    CHECK(spec.size() == 9);
    CHECK(spec.selected().front().is_constant());
    CHECK(count_level(spec, 1) == 4);
    CHECK(count_level(spec, 2) == 4);
  }

  TEST_CASE("full basis with per-level orders")
  {
    const auto spec = build_full(legendre_families(3, 2), { 0, 2, 1, 0 });
    CHECK(spec.size() == 10);
    CHECK(spec.size() == enumerate_full(3, { 0, 2, 1, 0 }));
    CHECK(build_full(legendre_families(1, 0), { 0, 0 }).size() == 1);
  }

  TEST_CASE("enumeration agrees with brute force")
  {
    for (std::size_t d = 1; d <= 4; ++d)
      for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 2; ++b) {
          std::vector<int> lo(d + 1, 1);
          lo[0] = 0;
          lo[1] = a;
          if (d >= 2)
            lo[2] = b;
          const auto spec = build_full(legendre_families(d, 3), lo);
          CHECK(spec.size() == enumerate_full(d, lo));
        }
  }

  TEST_CASE("level cardinality is m^|C|")
  {
    const auto spec = build_full(legendre_families(3, 3), { 0, 3, 3, 3 });
    for (const auto& g : spec.groups())
      CHECK(g.members.size() == std::size_t(std::pow(3, g.support.size())));
  }

  TEST_CASE("canonical order")
  {
    const auto spec = build_full(legendre_families(3, 2), { 0, 2, 2, 1 });
    const auto& s = spec.selected();
    for (std::size_t p = 1; p < s.size(); ++p)
      CHECK(canonical_less(s[p - 1], s[p]));
    CHECK(s[1].to_string() == "(1,0,0)");
    CHECK(s[2].to_string() == "(2,0,0)");
    CHECK(s[3].to_string() == "(0,1,0)");
    CHECK(s.back().to_string() == "(1,1,1)");
  }

  TEST_CASE("build_full errors")
  {
    CHECK_THROWS_AS(build_full(legendre_families(2, 2), { 0, 2 }), DomainError);
    std::vector<Family1D> fams{ Family1D::discrete(2, 1), Family1D::legendre(2) };
    CHECK_THROWS_AS(build_full(fams, { 0, 2, 1 }), DomainError);
    const auto clamped = build_full(fams, { 0, 2, 1 }, OrderCap::clamp_to_family);
    CHECK(clamped.size() == 1 + 1 + 2 + 1);
  }

  TEST_CASE("sparse bases")
  {
    const auto a = build_sparse(legendre_families(4, 1), { { 0, 1 }, { 2, 3 } }, 1);
    CHECK(a.size() == 3);
    CHECK(count_level(a, 1) == 0);
    CHECK(build_sparse(legendre_families(3, 2), {}, 2).size() == 1);
    const auto c = build_sparse(legendre_families(2, 2), { { 0 }, { 1 }, { 0, 1 } }, 2);
    CHECK(c.size() - 1 == 8);
    CHECK_THROWS_AS(build_sparse(legendre_families(2, 2), { { 0, 2 } }, 1), DomainError);
    CHECK_THROWS_AS(build_sparse(legendre_families(2, 2), { {} }, 1), DomainError);
  }

  TEST_CASE("index validation")
  {
    const auto fams = legendre_families(2, 2);
    CHECK_THROWS_AS(BasisSpec(fams, { MultiIndex({ 3, 0 }) }), DomainError);
    CHECK_THROWS_AS(BasisSpec(fams, { MultiIndex({ 1, 0, 0 }) }), DomainError);
    CHECK_THROWS_AS(BasisSpec(fams, { MultiIndex({ 2, 2 }) }, std::vector<int>{ 0, 2, 1 }),
                    DomainError);
    const BasisSpec dup(fams, { MultiIndex({ 1, 1 }), MultiIndex({ 1, 1 }), MultiIndex({ 0, 0 }) });
    CHECK(dup.size() == 2);
  }

  TEST_CASE("function evaluation")
  {
    const auto spec = build_full(legendre_families(2, 2), { 0, 2, 2 });
    const Point all{ 0.3, 0.9 };
    CHECK(eval_function(spec, MultiIndex({ 0, 0 }), all) == 1.0);
    const Point ones{ 1.0, 1.0 };
    CHECK(eval_function(spec, MultiIndex({ 1, 1 }), ones) == doctest::Approx(3.0).epsilon(1e-14));
    const Point half{ 0.5, std::nullopt };
    CHECK(std::abs(eval_function(spec, MultiIndex({ 1, 0 }), half)) < 1e-15);
    try {
      eval_function(spec, MultiIndex({ 1, 1 }), half);
      FAIL("expected a missing-coordinate error");
    } catch (const MissingCoordinateError& e) {
      CHECK(e.coordinate() == 1);
    }
    const Point outside{ 1.5, 0.2 };
    CHECK_THROWS_AS(eval_function(spec, MultiIndex({ 1, 1 }), outside), DomainError);
  }

  TEST_CASE("coordinates outside the support are never read")
  {
    const auto spec = build_full(legendre_families(3, 2), { 0, 2, 2, 2 });
    for (const auto& j : spec.selected()) {
      Point x(3);
      for (std::size_t i = 0; i < 3; ++i)
        x[i] = j[i] > 0 ? std::optional<double>(0.1 + 0.3 * i) : std::optional<double>(7.0);
      CHECK_NOTHROW(eval_function(spec, j, x));
      const PointEvaluator ev(spec, Point(x.size()));
      if (j.is_constant())
        CHECK(ev(j) == 1.0);
    }
  }

  TEST_CASE("point evaluator agrees with eval_function")
  {
    const auto spec = build_full(legendre_families(3, 3), { 0, 3, 2, 1 });
    const Point x{ 0.2, std::nullopt, 0.85 };
    const PointEvaluator ev(spec, x);
    for (const auto& j : spec.selected()) {
      const auto v = ev.try_eval(j);
      const bool usable = is_subset(j.support(), Subset{ 0, 2 });
      CHECK(v.has_value() == usable);
      if (usable)
        CHECK(*v == doctest::Approx(eval_function(spec, j, x)).epsilon(1e-14));
    }
  }

  TEST_CASE("tensor orthonormality by quadrature")
  {
    for (std::size_t d = 1; d <= 3; ++d) {
      std::vector<int> lo(d + 1, 3);
      lo[0] = 0;
      const auto spec = build_full(legendre_families(d, 3), lo);
      const auto q = gauss_legendre(6);
      const std::size_t n = q.nodes.size();
      std::size_t points = 1;
      for (std::size_t i = 0; i < d; ++i)
        points *= n;
      std::vector<double> gram(spec.size() * spec.size(), 0.0);
      for (std::size_t idx = 0; idx < points; ++idx) {
        Point x;
        double w = 1;
        for (std::size_t i = 0, r = idx; i < d; ++i, r /= n) {
          x.emplace_back(q.nodes[r % n]);
          w *= q.weights[r % n];
        }
        const PointEvaluator ev(spec, x);
        for (std::size_t a = 0; a < spec.size(); ++a)
          for (std::size_t b = 0; b < spec.size(); ++b)
            gram[a * spec.size() + b] += w * ev(spec.selected()[a]) * ev(spec.selected()[b]);
      }
      for (std::size_t a = 0; a < spec.size(); ++a)
        for (std::size_t b = 0; b < spec.size(); ++b)
          CHECK(std::abs(gram[a * spec.size() + b] - (a == b)) < 1e-9);
    }
  }

  TEST_CASE("restriction and removal")
  {
    const auto spec = build_full(legendre_families(3, 2), { 0, 2, 2, 0 });
    const auto r = spec.restricted_to({ 0, 2 });
    for (const auto& j : r.selected())
      CHECK(is_subset(j.support(), Subset{ 0, 2 }));
    CHECK(r.size() == 1 + 4 + 4);
    const auto w = spec.without({ 0, 1 });
    CHECK(w.size() == spec.size() - 1);
    CHECK(w.selected().front().is_constant());
  }
}
