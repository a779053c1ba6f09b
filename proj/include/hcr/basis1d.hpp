#pragma once

#include <cstddef>
#include <vector>

namespace hcr {

enum class FamilyKind
{
  legendre,
  trig,
  discrete
};

/// One-dimensional orthonormal family on [0,1] (continuous kinds) or on the
/// equally spaced grid {k/(v-1)} with weight 1/v per point (discrete kind).
/// Order 0 is always the constant 1.
///
/// Trig orders alternate sin/cos with frequency ceil(j/2):
///   j=1 -> sqrt2 sin(2 pi x), j=2 -> sqrt2 cos(2 pi x), j=3 -> sqrt2 sin(4 pi x)
class Family1D
{
public:
  static Family1D legendre(int max_order);
  static Family1D trig(int max_order);
  /// Gram-Schmidt orthonormalized monomials on `num_values` grid points.
  /// Requires num_values >= 2 and max_order <= num_values - 1.
  static Family1D discrete(int num_values, int max_order);

  FamilyKind kind() const { return kind_; }
  int max_order() const { return max_order_; }
  int num_values() const { return num_values_; }
  bool is_continuous() const { return kind_ != FamilyKind::discrete; }

  /// f_j(x). Throws DomainError for j out of range, x outside [0,1], or a
  /// discrete x that is not a grid point.
  double eval(int j, double x) const;

  /// Writes f_0(x) .. f_{max_order}(x) into `out` (size max_order + 1).
  void eval_all(double x, double* out) const;

  /// d/dx f_j(x); continuous families only.
  double derivative(int j, double x) const;

  /// Grid values k/(v-1) of a discrete family.
  std::vector<double> grid() const;
  /// Index of the grid point equal to x (tolerance 1e-9); throws otherwise.
  int grid_index(double x) const;
  /// Nearest grid point to x in [0,1].
  double snap(double x) const;

  /// Quadrature weight of each grid point of a discrete family (1/v).
  double grid_weight() const { return 1.0 / num_values_; }

  bool operator==(const Family1D& other) const;

private:
  Family1D(FamilyKind kind, int max_order, int num_values);

  void check_order(int j) const;
  void check_x(double x) const;

  FamilyKind kind_;
  int max_order_;
  int num_values_;
  // discrete only: table_[j * num_values_ + k] = f_j(k / (v - 1))
  std::vector<double> table_;
};

/// Gauss-Legendre nodes and weights mapped to [0,1].
struct Quadrature
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

Quadrature
gauss_legendre(int num_nodes);

/// Node count exact for polynomials of degree `degree`, with a margin of two.
int
gauss_legendre_nodes_for_degree(int degree);

/// <f_j1, f_j2> over [0,1] (continuous) or under the 1/v grid weight.
double
inner_product(const Family1D& family, int j1, int j2);

/// Integral over [0,1] of x^p f_j(x) for p in {0, 1, 2}; continuous only.
double
integrate_moment(const Family1D& family, int j, int p);

/// Power-basis coefficients c_0..c_j of the rescaled Legendre f_j.
std::vector<double>
legendre_power_coefficients(int j);

} // namespace hcr
