#include "hcr/dataset.hpp"
#include "hcr/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace hcr;

namespace {

Table
table_from(const std::string& text, TableOptions opts = {})
{
  std::istringstream in(text);
  return load_table(in, opts);
}

} // namespace

TEST_SUITE("dataset")
{
  TEST_CASE("missing tokens")
  {
    const auto t = table_from("a,b,c\n1,2,3\nNA,0.5,0.25\n0,,?\n");
    CHECK(t.rows() == 3);
    CHECK(t.columns() == 3);
    CHECK(known_set(t.values[1]) == Subset{ 1, 2 });
    CHECK(known_set(t.values[2]) == Subset{ 0 });
    CHECK(t.presence_counts() == std::vector<std::size_t>{ 2, 2, 2 });
    CHECK(t.cells[1][0] == "NA");
    CHECK(t.column("b") == 1);
    CHECK_FALSE(t.column("z").has_value());
  }

  TEST_CASE("custom delimiter and tokens")
  {
    TableOptions o;
    o.delimiter = ';';
    o.missing_tokens = { "", "-" };
    const auto t = table_from("x;y\n 1.5 ; - \n2;3\n", o);
    CHECK(*t.values[0][0] == 1.5);
    CHECK_FALSE(t.values[0][1].has_value());
    CHECK_THROWS_AS(table_from("x;y\nNA;1\n", o), DataError);
  }

  TEST_CASE("table errors")
  {
    CHECK_THROWS_AS(table_from(""), DataError);
    CHECK_THROWS_AS(table_from("a,b\n"), DataError);
    CHECK_THROWS_AS(table_from("a,b\n1,2\n3\n"), DataError);
    CHECK_THROWS_AS(table_from("a,b\n1,x\n"), DataError);
    CHECK_THROWS_AS(table_from("a,b\n1,inf\n"), DataError);
    CHECK_THROWS_AS(load_table_file("/nonexistent/table.csv"), DataError);
  }

  TEST_CASE("evidence counts of the two-coordinate layout")
  {
    const auto t = table_from("x1,x2\n"
                              "0.1,0.2\n0.4,0.9\n0.7,0.3\n"
                              "0.2,\n0.8,\n"
                              ",0.6\n");
    const auto data = apply_transforms(t, { Transform::unit(), Transform::unit() });
    CHECK(data.evidence({ 0 }) == 5);
    CHECK(data.evidence({ 1 }) == 4);
    CHECK(data.evidence({ 0, 1 }) == 3);
    CHECK(data.evidence({}) == 6);
    CHECK(data.complete(0));
    CHECK_FALSE(data.complete(3));
  }

  TEST_CASE("empirical CDF plotting positions")
  {
    const std::vector<double> v{ 8, 2, 6, 4 };
    const auto t = fit_empirical_cdf(v);
    CHECK(t.apply(2) == doctest::Approx(0.125));
    CHECK(t.apply(8) == doctest::Approx(0.875));
    CHECK(t.apply(5) == doctest::Approx(0.5));
    CHECK(t.apply(-100) == doctest::Approx(0.125));
    CHECK(t.apply(100) == doctest::Approx(0.875));
    const std::vector<double> odd{ 1, 3, 7, 9, 20 };
    CHECK(std::abs(fit_empirical_cdf(odd).apply(7) - 0.5) <= 1.0 / 10);
    const std::vector<double> same{ 5, 5 };
    CHECK_THROWS_AS(fit_empirical_cdf(same), DataError);
  }

  TEST_CASE("empirical CDF ties share their positions")
  {
    const std::vector<double> v{ 1, 2, 2, 3 };
    const auto t = fit_empirical_cdf(v);
    CHECK(t.apply(2) == doctest::Approx(0.5));
    CHECK(t.apply(1) == doctest::Approx(0.125));
  }

  TEST_CASE("empirical CDF makes the sample uniform")
  {
    std::mt19937_64 rng(7);
    std::lognormal_distribution<double> dist(0.0, 1.0);
    std::vector<double> xs(501);
    for (auto& x : xs)
      x = dist(rng);
    const auto t = fit_empirical_cdf(xs);
    std::vector<double> u;
    for (double x : xs)
      u.push_back(t.apply(x));
    std::sort(u.begin(), u.end());
    const double l = xs.size();
    double ks = 0;
    for (std::size_t k = 0; k < u.size(); ++k)
      ks = std::max({ ks, std::abs(u[k] - k / l), std::abs(u[k] - (k + 1) / l) });
    CHECK(ks <= 1.0 / l + 1e-12);
    for (std::size_t k = 1; k < u.size(); ++k)
      CHECK(u[k] > u[k - 1]);
  }

  TEST_CASE("empirical CDF inverse reproduces the sample")
  {
    const std::vector<double> v{ 10, -3, 4.5, 7, 0.25 };
    const auto t = fit_empirical_cdf(v);
    for (double x : v)
      CHECK(t.invert(t.apply(x)) == doctest::Approx(x).epsilon(1e-12));
  }

  TEST_CASE("logistic and rescale")
  {
    const auto s = Transform::logistic();
    CHECK(s.apply(0) == 0.5);
    CHECK(s.invert(0.5) == 0.0);
    for (double y : { -20.0, -3.0, -0.1, 0.7, 5.0, 15.0 })
      CHECK(std::abs(s.invert(s.apply(y)) - y) <= 1e-9 * std::abs(y));
    const auto r = Transform::rescale(0, 10);
    CHECK(r.apply(2.5) == 0.25);
    CHECK(r.apply(12) == 1.0);
    const auto strict = Transform::rescale(0, 10, true);
    CHECK_THROWS_AS(strict.apply(12), DomainError);
    CHECK(strict.invert(0.25) == 2.5);
    CHECK_THROWS_AS(strict.invert(1.5), DomainError);
    CHECK_THROWS_AS(Transform::rescale(1, 1), DomainError);
  }

  TEST_CASE("transforms are strictly increasing")
  {
    const std::vector<double> v{ 3, 1, 4, 1.5, 9, 2.6 };
    for (const auto& t : { Transform::logistic(), Transform::rescale(0, 10), fit_empirical_cdf(v) }) {
      double prev = -1;
      for (double x : { 1.0, 1.2, 2.0, 3.5, 4.0, 8.0, 9.0 }) {
        const double u = t.apply(x);
        CHECK(u > prev);
        prev = u;
      }
    }
  }

  TEST_CASE("categorical")
  {
    const auto c = Transform::categorical({ 1, 2, 3 });
    CHECK(c.apply(1) == 0.0);
    CHECK(c.apply(2) == 0.5);
    CHECK(c.apply(3) == 1.0);
    CHECK(c.invert(0.5) == 2);
    CHECK_THROWS_AS(c.apply(2.5), DomainError);
  }

  TEST_CASE("schema parsing and alignment")
  {
    std::istringstream in("# comment\n"
                          "age: continuous transform=rescale min=0 max=120\n"
                          "\n"
                          "grade: discrete categories=1,2,3\n"
                          "angle: continuous family=trig\n");
    const auto s = Schema::parse(in);
    REQUIRE(s.coordinates.size() == 3);
    CHECK(s.find("grade")->kind == CoordinateKind::discrete);
    CHECK(s.find("grade")->categories == std::vector<double>{ 1, 2, 3 });
    CHECK(s.find("angle")->family == "trig");
    CHECK(*s.find("age")->max == 120);
    const auto aligned = s.align({ "other", "age", "grade", "angle" });
    CHECK(aligned[0].transform == "unit");
    CHECK(aligned[1].transform == "rescale");
    CHECK_THROWS_AS(s.align({ "age", "grade" }), DataError);

    std::istringstream bad("x: continuous transform=magic\n");
    CHECK_THROWS_AS(Schema::parse(bad), DataError);
  }

  TEST_CASE("fitted transforms and missingness")
  {
    const auto t = table_from("a,b,c\n1,10,2\n,20,1\n3,,2\n5,40,\n");
    std::vector<CoordinateSchema> sc(3);
    sc[0].name = "a";
    sc[0].transform = "ecdf";
    sc[1].name = "b";
    sc[1].transform = "rescale";
    sc[2].name = "c";
    sc[2].kind = CoordinateKind::discrete;
    sc[2].transform = "categorical";
    const auto tr = fit_transforms(sc, t);
    CHECK(tr[1].min() == 10);
    CHECK(tr[1].max() == 40);
    CHECK(tr[2].categories() == std::vector<double>{ 1, 2 });
    const auto data = apply_transforms(t, tr);
    for (std::size_t k = 0; k < t.rows(); ++k)
      CHECK(data.known(k) == known_set(t.values[k]));
    for (const auto& r : data)
      for (const auto& v : r)
        if (v)
          CHECK((*v >= 0 && *v <= 1));
  }

  TEST_CASE("dataset rejects values outside the unit cube")
  {
    Dataset d(2);
    CHECK_THROWS_AS(d.add({ 0.5, 1.2 }), DomainError);
    CHECK_THROWS_AS(d.add({ 0.5 }), DomainError);
    d.add({ 0.5, std::nullopt });
    CHECK(d.size() == 1);
  }

  TEST_CASE("format_double round-trips")
  {
    for (double x : { 0.1, 1.0 / 3, -2.5e-300, 12345.678901234567 })
      CHECK(std::stod(format_double(x)) == x);
  }
}
