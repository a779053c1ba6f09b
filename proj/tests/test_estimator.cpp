#include "oracles.hpp"

#include "hcr/density.hpp"
#include "hcr/errors.hpp"
#include "hcr/estimator.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

using namespace hcr;

namespace {

BasisSpec
legendre_full(std::size_t d, int m)
{
  std::vector<int> lo(d + 1, m);
  lo[0] = 0;
  return build_full(std::vector<Family1D>(d, Family1D::legendre(m)), lo);
}

Dataset
uniform_complete(std::size_t d, std::size_t n, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset data(d);
  for (std::size_t k = 0; k < n; ++k) {
    Record r(d);
    for (auto& v : r)
      v = u(rng) * u(rng);
    data.add(r);
  }
  return data;
}

Dataset
layout_with_gaps()
{
  using std::nullopt;
  return Dataset(2,
                 { { 0.1, 0.2 }, { 0.4, 0.9 }, { 0.7, 0.3 },
                   { 0.2, nullopt }, { 0.8, nullopt },
                   { nullopt, 0.6 } });
}

} // namespace

TEST_SUITE("estimator")
{
  TEST_CASE("constant coefficient is one")
  {
    const auto m = fit(legendre_full(2, 2), uniform_complete(2, 20, 1));
    CHECK(m.coefficient(0) == 1.0);
    CHECK_THROWS_AS(Model(m).set_coefficient(0, 0.5), DomainError);
  }

  TEST_CASE("symmetric sample")
  {
    const Dataset d(1, { { 0.0 }, { 1.0 } });
    const auto m = fit(legendre_full(1, 1), d);
    CHECK(std::abs(m.coefficient(1)) < 1e-15);
  }

  TEST_CASE("evidence sets with gaps")
  {
    const auto data = layout_with_gaps();
    const auto spec = legendre_full(2, 2);
    const auto m = fit(spec, data);
    CHECK(m.evidence({ 0 }) == 5);
    CHECK(m.evidence({ 1 }) == 4);
    CHECK(m.evidence({ 0, 1 }) == 3);
    // (1,0) averages x1 over the five records that have it
    double s = 0;
    for (double x : { 0.1, 0.4, 0.7, 0.2, 0.8 })
      s += oracle::legendre_closed(1, x);
    CHECK(m.coefficient(*spec.find(MultiIndex({ 1, 0 }))) == doctest::Approx(s / 5).epsilon(1e-14));
    s = 0;
    for (double x : { 0.2, 0.9, 0.3, 0.6 })
      s += oracle::legendre_closed(2, x);
    CHECK(m.coefficient(*spec.find(MultiIndex({ 0, 2 }))) == doctest::Approx(s / 4).epsilon(1e-14));
    s = 0;
    for (auto [a, b] : { std::pair{ 0.1, 0.2 }, { 0.4, 0.9 }, { 0.7, 0.3 } })
      s += oracle::legendre_closed(1, a) * oracle::legendre_closed(2, b);
    CHECK(m.coefficient(*spec.find(MultiIndex({ 1, 2 }))) == doctest::Approx(s / 3).epsilon(1e-14));
  }

  TEST_CASE("complete data reduces to plain averaging")
  {
    const auto data = uniform_complete(2, 300, 3);
    const auto spec = legendre_full(2, 3);
    const auto m = fit(spec, data);
    for (std::size_t p = 0; p < spec.size(); ++p) {
      const auto& j = spec.selected()[p];
      double s = 0;
      for (const auto& r : data)
        s += oracle::legendre_closed(j[0], *r[0]) * oracle::legendre_closed(j[1], *r[1]);
      CHECK(std::abs(m.coefficient(p) - s / data.size()) < 1e-12);
    }
  }

  TEST_CASE("uncertainty is the standard error")
  {
    const auto data = uniform_complete(1, 50, 4);
    const auto spec = legendre_full(1, 2);
    const auto m = fit(spec, data);
    for (std::size_t p = 1; p < spec.size(); ++p) {
      std::vector<double> v;
      for (const auto& r : data)
        v.push_back(oracle::legendre_closed(spec.selected()[p][0], *r[0]));
      CHECK(m.uncertainty(p) == doctest::Approx(oracle::sample_sd(v) / std::sqrt(50.0)).epsilon(1e-12));
      CHECK(m.flags(p) == flag_none);
    }
  }

  TEST_CASE("no evidence and single-record flags")
  {
    using std::nullopt;
    const Dataset d(2, { { 0.3, nullopt }, { 0.6, nullopt }, { 0.5, nullopt } });
    const auto spec = legendre_full(2, 1);
    const auto m = fit(spec, d);
    const auto p01 = *spec.find(MultiIndex({ 0, 1 }));
    CHECK(m.coefficient(p01) == 0.0);
    CHECK((m.flags(p01) & flag_no_evidence));
    const Dataset one(1, { { 0.3 } });
    const auto m1 = fit(legendre_full(1, 1), one);
    CHECK((m1.flags(1) & flag_uncertainty_undefined));
    CHECK(std::isinf(m1.uncertainty(1)));
  }

  TEST_CASE("evidence is monotone in the subset order")
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d(3);
    for (int k = 0; k < 200; ++k) {
      Record r(3);
      for (auto& v : r)
        if (u(rng) < 0.7)
          v = u(rng);
      d.add(r);
    }
    const auto m = fit(legendre_full(3, 1), d);
    for (const auto& [c, n] : m.evidence())
      for (const auto& [c2, n2] : m.evidence())
        if (is_subset(c, c2))
          CHECK(n >= n2);
  }

  TEST_CASE("exact expectations recover the coefficients")
  {
    // a discrete sample whose empirical frequencies are known exactly
    const int v = 3;
    const auto fam = Family1D::discrete(v, 2);
    const auto spec = build_full({ fam, fam }, { 0, 2, 2 });
    const int counts[3][3] = { { 4, 1, 2 }, { 3, 6, 1 }, { 2, 2, 9 } };
    Dataset d(2);
    int total = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < counts[a][b]; ++c, ++total)
          d.add({ a / 2.0, b / 2.0 });
    const auto m = fit(spec, d);
    for (std::size_t p = 0; p < spec.size(); ++p) {
      const auto& j = spec.selected()[p];
      double expect = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          expect += double(counts[a][b]) / total * fam.eval(j[0], a / 2.0) * fam.eval(j[1], b / 2.0);
      CHECK(std::abs(m.coefficient(p) - expect) < 1e-12);
    }
  }

  TEST_CASE("adaptive update")
  {
    const auto fam = Family1D::discrete(2, 1);
    const auto spec = build_full({ fam, fam }, { 0, 1, 1 });
    Model m(spec);
    const auto p10 = *spec.find(MultiIndex({ 1, 0 }));
    adapt_in_place(m, { 1.0, std::nullopt }, 0.5);
    CHECK(m.coefficient(p10) == 0.5);
    CHECK(m.evidence({ 0 }) == 1);
    CHECK(m.evidence({ 1 }) == 0);
    for (std::size_t p = 0; p < spec.size(); ++p)
      if (spec.selected()[p][1] > 0)
        CHECK(m.coefficient(p) == 0.0);
    CHECK(m.coefficient(0) == 1.0);
    CHECK_FALSE((m.flags(p10) & flag_no_evidence));
    CHECK_THROWS_AS(adapt(m, { 1.0, 1.0 }, 0.0), DomainError);
    CHECK_THROWS_AS(adapt(m, { 1.0, 1.0 }, 1.0), DomainError);
  }

  TEST_CASE("constant stream converges geometrically")
  {
    const auto spec = legendre_full(2, 2);
    Model m = fit(spec, uniform_complete(2, 30, 9));
    const Model start = m;
    const Record x{ 0.8, 0.35 };
    const double lambda = 0.1;
    for (int t = 1; t <= 40; ++t) {
      adapt_in_place(m, x, lambda);
      for (std::size_t p = 1; p < spec.size(); ++p) {
        const double target = eval_function(spec, spec.selected()[p], x);
        const double expect = std::pow(1 - lambda, t) * std::abs(start.coefficient(p) - target);
        CHECK(std::abs(m.coefficient(p) - target) == doctest::Approx(expect).epsilon(1e-9).scale(1e-12));
      }
    }
  }

  TEST_CASE("learning rate schedule")
  {
    const LearningRateSchedule s(101);
    CHECK(s(0) == doctest::Approx(0.05));
    CHECK(s(100) == doctest::Approx(0.001));
    CHECK(s(50) == doctest::Approx(std::sqrt(0.05 * 0.001)));
    CHECK(s(500) == doctest::Approx(0.001));
  }

  TEST_CASE("online estimator snapshots are never torn")
  {
    const auto spec = legendre_full(2, 2);
    OnlineEstimator est{ Model(spec) };
    std::atomic<bool> done{ false };
    std::atomic<int> torn{ 0 };
    std::thread reader([&] {
      while (!done) {
        const auto snap = est.snapshot();
        // the stream is symmetric, so mirrored coefficients must agree
        for (std::size_t p = 1; p < snap->size(); ++p) {
          const auto& j = spec.selected()[p];
          const auto q = *spec.find(MultiIndex({ j[1], j[0] }));
          if (snap->coefficient(p) != snap->coefficient(q))
            ++torn;
        }
      }
    });
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
      const double v = u(rng);
      est.update({ v, v }, 0.01);
    }
    done = true;
    reader.join();
    CHECK(torn == 0);
    CHECK(est.snapshot()->evidence({ 0, 1 }) == 2000);
  }

  TEST_CASE("pruning")
  {
    const auto spec = legendre_full(2, 2);
    const auto m = fit(spec, uniform_complete(2, 200, 11));
    CHECK(prune(m, 0).model.size() == m.size());
    CHECK(prune(m, 0).removed.empty());
    const auto all = prune(m, 1e9);
    CHECK(all.model.size() == 1);
    CHECK(all.removed.size() == m.size() - 1);

    Model manual(legendre_full(1, 2));
    manual.set_coefficient(1, 0.01);
    manual.set_uncertainty(1, 0.05);
    manual.set_coefficient(2, 0.5);
    manual.set_uncertainty(2, 0.05);
    const auto r = prune(manual, 2);
    REQUIRE(r.removed.size() == 1);
    CHECK(r.removed[0] == MultiIndex({ 1 }));
    CHECK(r.model.size() == 2);
    CHECK(r.model.coefficient(1) == 0.5);
  }
}
