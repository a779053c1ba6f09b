#pragma once

#include <vector>

namespace hcr {

/// Real polynomial in the power basis, c[k] x^k.
class Polynomial
{
public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const { return c_; }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  double operator()(double x) const;
  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial operator*(double s) const;

  /// Real roots in [lo, hi], ascending. Roots are isolated between the
  /// critical points (found recursively) and refined by bisection.
  std::vector<double> roots_in(double lo, double hi, double tolerance = 1e-12) const;

private:
  void trim();

  std::vector<double> c_;
};

} // namespace hcr
