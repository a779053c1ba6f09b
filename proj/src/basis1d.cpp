#include "hcr/basis1d.hpp"

#include "hcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hcr {

namespace {

constexpr double kGridTolerance = 1e-9;

// Rescaled Legendre polynomials f_j(x) = sqrt(2j+1) P_j(2x-1), closed forms
// for j <= 5.
double
legendre_closed_form(int j, double x)
{
  const double x2 = x * x;
  switch (j) {
    case 0:
      return 1.0;
    case 1:
      return std::sqrt(3.0) * (2.0 * x - 1.0);
    case 2:
      return std::sqrt(5.0) * (6.0 * x2 - 6.0 * x + 1.0);
    case 3:
      return std::sqrt(7.0) * (((20.0 * x - 30.0) * x + 12.0) * x - 1.0);
    case 4:
      return 3.0 * ((((70.0 * x - 140.0) * x + 90.0) * x - 20.0) * x + 1.0);
    case 5:
      return std::sqrt(11.0) *
             (((((252.0 * x - 630.0) * x + 560.0) * x - 210.0) * x + 30.0) *
                x -
              1.0);
    default:
      return NAN;
  }
}

// Unnormalized Legendre P_0..P_n at t in [-1,1] by the three-term recurrence.
void
legendre_recurrence(int n, double t, double* p)
{
  p[0] = 1.0;
  if (n >= 1)
    p[1] = t;
  for (int k = 1; k < n; ++k)
    p[k + 1] = ((2.0 * k + 1.0) * t * p[k] - k * p[k - 1]) / (k + 1.0);
}

double
legendre_eval(int j, double x)
{
  if (j <= 5)
    return legendre_closed_form(j, x);
  std::vector<double> p(j + 1);
  legendre_recurrence(j, 2.0 * x - 1.0, p.data());
  return std::sqrt(2.0 * j + 1.0) * p[j];
}

double
trig_frequency(int j)
{
  return 2.0 * std::numbers::pi * ((j + 1) / 2);
}

} // namespace

Family1D::Family1D(FamilyKind kind, int max_order, int num_values)
  : kind_(kind)
  , max_order_(max_order)
  , num_values_(num_values)
{}

Family1D
Family1D::legendre(int max_order)
{
  if (max_order < 0)
    throw DomainError("legendre family: negative max_order");
  return Family1D(FamilyKind::legendre, max_order, 0);
}

Family1D
Family1D::trig(int max_order)
{
  if (max_order < 0)
    throw DomainError("trig family: negative max_order");
  return Family1D(FamilyKind::trig, max_order, 0);
}

Family1D
Family1D::discrete(int num_values, int max_order)
{
  if (num_values < 2)
    throw DomainError("discrete family needs at least 2 values");
  if (max_order < 0 || max_order > num_values - 1)
    throw DomainError("discrete family with " + std::to_string(num_values) +
                      " values supports orders 0.." +
                      std::to_string(num_values - 1));
  Family1D family(FamilyKind::discrete, max_order, num_values);

  const int v = num_values;
  const double w = 1.0 / v;
  auto& table = family.table_;
  table.assign(static_cast<std::size_t>(max_order + 1) * v, 0.0);
  auto row = [&](int j) { return table.data() + static_cast<std::size_t>(j) * v; };
  auto dot = [&](const double* a, const double* b) {
    double s = 0.0;
    for (int k = 0; k < v; ++k)
      s += w * a[k] * b[k];
    return s;
  };

  for (int j = 0; j <= max_order; ++j) {
    double* r = row(j);
    for (int k = 0; k < v; ++k)
      r[k] = std::pow(static_cast<double>(k) / (v - 1), j);
    // modified Gram-Schmidt, two passes
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        const double c = dot(r, row(i));
        const double* q = row(i);
        for (int k = 0; k < v; ++k)
          r[k] -= c * q[k];
      }
    }
    const double norm = std::sqrt(dot(r, r));
    for (int k = 0; k < v; ++k)
      r[k] /= norm;
  }
  // exact constant
  for (int k = 0; k < v; ++k)
    table[k] = 1.0;
  return family;
}

void
Family1D::check_order(int j) const
{
  if (j < 0 || j > max_order_)
    throw DomainError("basis order " + std::to_string(j) +
                      " outside 0.." + std::to_string(max_order_));
}

void
Family1D::check_x(double x) const
{
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("basis argument " + std::to_string(x) +
                      " outside [0,1]");
}

double
Family1D::eval(int j, double x) const
{
  check_order(j);
  check_x(x);
  switch (kind_) {
    case FamilyKind::legendre:
      return legendre_eval(j, x);
    case FamilyKind::trig: {
      if (j == 0)
        return 1.0;
      const double arg = trig_frequency(j) * x;
      return std::numbers::sqrt2 * ((j % 2 == 1) ? std::sin(arg) : std::cos(arg));
    }
    case FamilyKind::discrete:
      return table_[static_cast<std::size_t>(j) * num_values_ + grid_index(x)];
  }
  return NAN;
}

void
Family1D::eval_all(double x, double* out) const
{
  check_x(x);
  switch (kind_) {
    case FamilyKind::legendre: {
      const int n = max_order_;
      for (int j = 0; j <= std::min(n, 5); ++j)
        out[j] = legendre_closed_form(j, x);
      if (n > 5) {
        std::vector<double> p(n + 1);
        legendre_recurrence(n, 2.0 * x - 1.0, p.data());
        for (int j = 6; j <= n; ++j)
          out[j] = std::sqrt(2.0 * j + 1.0) * p[j];
      }
      return;
    }
    case FamilyKind::trig:
      out[0] = 1.0;
      for (int j = 1; j <= max_order_; ++j) {
        const double arg = trig_frequency(j) * x;
        out[j] = std::numbers::sqrt2 * ((j % 2 == 1) ? std::sin(arg) : std::cos(arg));
      }
      return;
    case FamilyKind::discrete: {
      const int k = grid_index(x);
      for (int j = 0; j <= max_order_; ++j)
        out[j] = table_[static_cast<std::size_t>(j) * num_values_ + k];
      return;
    }
  }
}

double
Family1D::derivative(int j, double x) const
{
  check_order(j);
  check_x(x);
  switch (kind_) {
    case FamilyKind::legendre: {
      if (j == 0)
        return 0.0;
      // P'_{k+1} = (2k+1) P_k + P'_{k-1}
      const double t = 2.0 * x - 1.0;
      std::vector<double> p(j + 1);
      legendre_recurrence(j, t, p.data());
      double dm1 = 0.0; // P'_0
      double d = 1.0;   // P'_1
      for (int k = 1; k < j; ++k) {
        const double next = (2.0 * k + 1.0) * p[k] + dm1;
        dm1 = d;
        d = next;
      }
      return std::sqrt(2.0 * j + 1.0) * 2.0 * d;
    }
    case FamilyKind::trig: {
      if (j == 0)
        return 0.0;
      const double w = trig_frequency(j);
      return std::numbers::sqrt2 * w *
             ((j % 2 == 1) ? std::cos(w * x) : -std::sin(w * x));
    }
    case FamilyKind::discrete:
      throw DomainError("derivative of a discrete family is undefined");
  }
  return NAN;
}

std::vector<double>
Family1D::grid() const
{
  std::vector<double> g;
  if (kind_ != FamilyKind::discrete)
    return g;
  g.reserve(num_values_);
  for (int k = 0; k < num_values_; ++k)
    g.push_back(static_cast<double>(k) / (num_values_ - 1));
  return g;
}

int
Family1D::grid_index(double x) const
{
  if (kind_ != FamilyKind::discrete)
    throw DomainError("grid_index on a continuous family");
  check_x(x);
  const double scaled = x * (num_values_ - 1);
  const double k = std::round(scaled);
  if (std::abs(scaled - k) > kGridTolerance * (num_values_ - 1))
    throw DomainError("value " + std::to_string(x) +
                      " is not on the discrete grid of " +
                      std::to_string(num_values_) + " values");
  return static_cast<int>(k);
}

double
Family1D::snap(double x) const
{
  if (kind_ != FamilyKind::discrete)
    return x;
  const double k = std::round(std::clamp(x, 0.0, 1.0) * (num_values_ - 1));
  return k / (num_values_ - 1);
}

bool
Family1D::operator==(const Family1D& other) const
{
  return kind_ == other.kind_ && max_order_ == other.max_order_ &&
         num_values_ == other.num_values_;
}

Quadrature
gauss_legendre(int num_nodes)
{
  if (num_nodes < 1)
    throw DomainError("gauss_legendre needs at least one node");
  const int n = num_nodes;
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  if (n == 1) {
    q.nodes[0] = 0.5;
    q.weights[0] = 1.0;
    return q;
  }
  // P_n(t) and P'_n(t)
  auto legendre_n = [n](double t, double& dp) {
    double p0 = 1.0, p1 = t;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    return p1;
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dt = legendre_n(t, dp) / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16)
        break;
    }
    legendre_n(t, dp);
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    // map [-1,1] -> [0,1], nodes ascending
    q.nodes[i] = 0.5 * (1.0 - t);
    q.weights[i] = 0.5 * w;
    q.nodes[n - 1 - i] = 0.5 * (1.0 + t);
    q.weights[n - 1 - i] = 0.5 * w;
  }
  return q;
}

int
gauss_legendre_nodes_for_degree(int degree)
{
  return (degree + 2 + 1) / 2 + 2;
}

double
inner_product(const Family1D& family, int j1, int j2)
{
  if (j1 < 0 || j1 > family.max_order() || j2 < 0 || j2 > family.max_order())
    throw DomainError("inner_product: order out of range");
  if (family.kind() == FamilyKind::discrete) {
    double s = 0.0;
    for (double x : family.grid())
      s += family.eval(j1, x) * family.eval(j2, x);
    return s * family.grid_weight();
  }
  const int nodes = family.kind() == FamilyKind::legendre
                      ? gauss_legendre_nodes_for_degree(j1 + j2)
                      : 8 * (j1 + j2 + 4);
  const Quadrature q = gauss_legendre(nodes);
  double s = 0.0;
  for (int i = 0; i < nodes; ++i)
    s += q.weights[i] * family.eval(j1, q.nodes[i]) * family.eval(j2, q.nodes[i]);
  return s;
}

double
integrate_moment(const Family1D& family, int j, int p)
{
  if (!family.is_continuous())
    throw DomainError("integrate_moment: discrete family, use weighted sums");
  if (p < 0 || p > 2)
    throw DomainError("integrate_moment: power must be 0, 1 or 2");
  if (j < 0 || j > family.max_order())
    throw DomainError("integrate_moment: order out of range");
  if (j == 0)
    return 1.0 / (p + 1);
  if (p == 0)
    return 0.0;

  if (family.kind() == FamilyKind::trig) {
    const double w = trig_frequency(j);
    const bool is_sin = (j % 2 == 1);
    if (is_sin)
      return -std::numbers::sqrt2 / w; // same for p = 1 and p = 2
    return p == 1 ? 0.0 : std::numbers::sqrt2 * 2.0 / (w * w);
  }

  // exact from the power-basis expansion
  const std::vector<double> c = legendre_power_coefficients(j);
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k)
    s += c[k] / (static_cast<double>(k) + p + 1.0);
  return s;
}

std::vector<double>
legendre_power_coefficients(int j)
{
  if (j < 0)
    throw DomainError("legendre_power_coefficients: negative order");
  // Shifted Legendre Ps_k(x) = P_k(2x-1): (k+1) Ps_{k+1} = (2k+1)(2x-1) Ps_k - k Ps_{k-1}
  std::vector<double> prev{1.0};
  if (j == 0)
    return prev;
  std::vector<double> cur{-1.0, 2.0};
  for (int k = 1; k < j; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      next[i] -= (2.0 * k + 1.0) * cur[i];
      next[i + 1] += 2.0 * (2.0 * k + 1.0) * cur[i];
    }
    for (int i = 0; i < k; ++i)
      next[i] -= k * prev[i];
    for (double& v : next)
      v /= (k + 1.0);
    prev = std::move(cur);
    cur = std::move(next);
  }
  const double scale = std::sqrt(2.0 * j + 1.0);
  for (double& v : cur)
    v *= scale;
  return cur;
}

} // namespace hcr
