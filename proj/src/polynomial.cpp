#include "hcr/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace hcr {

Polynomial::Polynomial(std::vector<double> coefficients)
  : c_(std::move(coefficients))
{
  trim();
}

void
Polynomial::trim()
{
  double scale = 0.0;
  for (double v : c_)
    scale = std::max(scale, std::abs(v));
  while (!c_.empty() && std::abs(c_.back()) <= 1e-14 * scale)
    c_.pop_back();
  if (scale == 0.0)
    c_.clear();
}

double
Polynomial::operator()(double x) const
{
  double s = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    s = s * x + *it;
  return s;
}

Polynomial
Polynomial::derivative() const
{
  if (c_.size() <= 1)
    return Polynomial();
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k)
    d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial
Polynomial::antiderivative() const
{
  std::vector<double> a(c_.size() + 1, 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k)
    a[k + 1] = c_[k] / static_cast<double>(k + 1);
  return Polynomial(std::move(a));
}

Polynomial
Polynomial::operator*(const Polynomial& other) const
{
  if (c_.empty() || other.c_.empty())
    return Polynomial();
  std::vector<double> p(c_.size() + other.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t k = 0; k < other.c_.size(); ++k)
      p[i + k] += c_[i] * other.c_[k];
  return Polynomial(std::move(p));
}

Polynomial&
Polynomial::operator+=(const Polynomial& other)
{
  if (other.c_.size() > c_.size())
    c_.resize(other.c_.size(), 0.0);
  for (std::size_t k = 0; k < other.c_.size(); ++k)
    c_[k] += other.c_[k];
  trim();
  return *this;
}

Polynomial
Polynomial::operator*(double s) const
{
  std::vector<double> p(c_);
  for (double& v : p)
    v *= s;
  return Polynomial(std::move(p));
}

std::vector<double>
Polynomial::roots_in(double lo, double hi, double tolerance) const
{
  std::vector<double> roots;
  if (degree() < 1 || !(hi >= lo))
    return roots;
  if (degree() == 1) {
    const double r = -c_[0] / c_[1];
    if (r >= lo && r <= hi)
      roots.push_back(r);
    return roots;
  }

  double scale = 0.0;
  for (double v : c_)
    scale = std::max(scale, std::abs(v));
  const double zero_tol = 1e-13 * scale;

  // monotone pieces between critical points
  std::vector<double> knots{ lo };
  for (double r : derivative().roots_in(lo, hi, tolerance))
    if (r > lo && r < hi)
      knots.push_back(r);
  knots.push_back(hi);

  auto add = [&](double r) {
    if (roots.empty() || r - roots.back() > 10 * tolerance)
      roots.push_back(r);
  };

  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    double a = knots[k], b = knots[k + 1];
    double fa = (*this)(a), fb = (*this)(b);
    if (std::abs(fa) <= zero_tol) {
      add(a);
      continue;
    }
    if (std::abs(fb) <= zero_tol)
      continue; // picked up as the left end of the next piece (or below)
    if ((fa < 0) == (fb < 0))
      continue;
    for (int iter = 0; iter < 200 && b - a > tolerance; ++iter) {
      const double m = 0.5 * (a + b);
      const double fm = (*this)(m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    add(0.5 * (a + b));
  }
  if (std::abs((*this)(hi)) <= zero_tol)
    add(hi);
  return roots;
}

} // namespace hcr
