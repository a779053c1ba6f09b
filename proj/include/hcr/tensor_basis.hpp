#pragma once

#include "hcr/basis1d.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hcr {

/// Sorted set of coordinate indices (0-based).
using Subset = std::vector<std::size_t>;

/// A point of [0,1]^d with possibly missing coordinates.
using Point = std::vector<std::optional<double>>;
using PointView = std::span<const std::optional<double>>;

bool
is_subset(const Subset& inner, const Subset& outer);

/// Orders (j_1..j_d) of a tensor-product function f_j1(x_1)...f_jd(x_d).
class MultiIndex
{
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> orders);
  static MultiIndex zero(std::size_t dimension);

  std::size_t dimension() const { return orders_.size(); }
  int operator[](std::size_t i) const { return orders_[i]; }
  const std::vector<int>& orders() const { return orders_; }

  /// {i : j_i > 0}
  Subset support() const;
  std::size_t level() const;
  bool is_constant() const { return level() == 0; }
  int max_order() const;

  /// "(1,0,2)"
  std::string to_string() const;

  bool operator==(const MultiIndex&) const = default;

private:
  std::vector<int> orders_;
};

/// Canonical ordering: by |support|, then support set, then order vector.
bool
canonical_less(const MultiIndex& a, const MultiIndex& b);

/// Selected functions of one support C (the set B_C).
struct SupportGroup
{
  Subset support;
  std::vector<std::size_t> members; // positions in BasisSpec::selected()
};

/// Per-coordinate families plus the selected multi-indices B = U_C B_C,
/// stored in canonical order. The all-zero index is always present (first).
class BasisSpec
{
public:
  BasisSpec() = default;
  /// Validates every index against the families (and level_orders when given),
  /// sorts canonically, drops duplicates and inserts the constant.
  BasisSpec(std::vector<Family1D> families,
            std::vector<MultiIndex> selected,
            std::optional<std::vector<int>> level_orders = std::nullopt);

  std::size_t dimension() const { return families_.size(); }
  const std::vector<Family1D>& families() const { return families_; }
  const Family1D& family(std::size_t i) const { return families_[i]; }
  const std::vector<MultiIndex>& selected() const { return selected_; }
  std::size_t size() const { return selected_.size(); }
  const std::optional<std::vector<int>>& level_orders() const
  {
    return level_orders_;
  }

  /// Supports with nonempty B_C, in canonical order; the first is C = {}.
  const std::vector<SupportGroup>& groups() const { return groups_; }

  std::optional<std::size_t> find(const MultiIndex& j) const;

  /// Copy without the selected entries at `positions` (constant is kept).
  BasisSpec without(const std::vector<std::size_t>& positions) const;
  /// Copy keeping only functions with support inside `keep`.
  BasisSpec restricted_to(const Subset& keep) const;

private:
  std::vector<Family1D> families_;
  std::vector<MultiIndex> selected_;
  std::optional<std::vector<int>> level_orders_;
  std::vector<SupportGroup> groups_;
};

enum class OrderCap
{
  strict,         ///< an order above a discrete family's capacity is an error
  clamp_to_family ///< per-coordinate orders are limited to the family max_order
};

/// All j with 1 <= j_i <= level_orders[|supp j|] on the support. level_orders
/// must have d + 1 entries (index = correlation level, entry 0 ignored); an
/// entry of 0 skips that level.
BasisSpec
build_full(std::vector<Family1D> families,
           const std::vector<int>& level_orders,
           OrderCap cap = OrderCap::strict);

/// Nonempty B_C only for the whitelisted supports, all orders 1..order.
BasisSpec
build_sparse(std::vector<Family1D> families,
             const std::vector<Subset>& whitelist,
             int order);

/// f_j(x); coordinates outside supp(j) are never read.
double
eval_function(const BasisSpec& spec, const MultiIndex& j, PointView x);

/// Caches f_0..f_max(x_i) per known coordinate of one point.
class PointEvaluator
{
public:
  PointEvaluator(const BasisSpec& spec, PointView x);

  bool known(std::size_t i) const { return known_[i]; }
  double value(std::size_t coordinate, int order) const
  {
    return values_[offsets_[coordinate] + order];
  }
  /// Product over the support; throws MissingCoordinateError.
  double operator()(const MultiIndex& j) const;
  /// Product over the support, or nullopt if a support coordinate is missing.
  std::optional<double> try_eval(const MultiIndex& j) const;

private:
  std::vector<bool> known_;
  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

} // namespace hcr
