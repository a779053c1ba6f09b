#include "hcr/tensor_basis.hpp"

#include "hcr/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace hcr {

bool
is_subset(const Subset& inner, const Subset& outer)
{
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

MultiIndex::MultiIndex(std::vector<int> orders)
  : orders_(std::move(orders))
{
  for (int j : orders_)
    if (j < 0)
      throw DomainError("multi-index with a negative order");
}

MultiIndex
MultiIndex::zero(std::size_t dimension)
{
  return MultiIndex(std::vector<int>(dimension, 0));
}

Subset
MultiIndex::support() const
{
  Subset s;
  for (std::size_t i = 0; i < orders_.size(); ++i)
    if (orders_[i] > 0)
      s.push_back(i);
  return s;
}

std::size_t
MultiIndex::level() const
{
  return static_cast<std::size_t>(
    std::count_if(orders_.begin(), orders_.end(), [](int j) { return j > 0; }));
}

int
MultiIndex::max_order() const
{
  return orders_.empty() ? 0 : *std::max_element(orders_.begin(), orders_.end());
}

std::string
MultiIndex::to_string() const
{
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < orders_.size(); ++i)
    os << (i ? "," : "") << orders_[i];
  os << ')';
  return os.str();
}

bool
canonical_less(const MultiIndex& a, const MultiIndex& b)
{
  const std::size_t la = a.level(), lb = b.level();
  if (la != lb)
    return la < lb;
  const Subset sa = a.support(), sb = b.support();
  if (sa != sb)
    return sa < sb;
  return a.orders() < b.orders();
}

BasisSpec::BasisSpec(std::vector<Family1D> families,
                     std::vector<MultiIndex> selected,
                     std::optional<std::vector<int>> level_orders)
  : families_(std::move(families))
  , selected_(std::move(selected))
  , level_orders_(std::move(level_orders))
{
  const std::size_t d = families_.size();
  if (level_orders_ && level_orders_->size() != d + 1)
    throw DomainError("level_orders must have d + 1 entries");

  for (const MultiIndex& j : selected_) {
    if (j.dimension() != d)
      throw DomainError("multi-index " + j.to_string() +
                        " does not match dimension " + std::to_string(d));
    for (std::size_t i = 0; i < d; ++i)
      if (j[i] > families_[i].max_order())
        throw DomainError("multi-index " + j.to_string() + " exceeds max order " +
                          std::to_string(families_[i].max_order()) +
                          " of coordinate " + std::to_string(i));
    if (level_orders_ && !j.is_constant() &&
        j.max_order() > (*level_orders_)[j.level()])
      throw DomainError("multi-index " + j.to_string() +
                        " exceeds the order allowed at its correlation level");
  }

  selected_.push_back(MultiIndex::zero(d));
  std::sort(selected_.begin(), selected_.end(), canonical_less);
  selected_.erase(std::unique(selected_.begin(), selected_.end()),
                  selected_.end());

  for (std::size_t pos = 0; pos < selected_.size(); ++pos) {
    Subset s = selected_[pos].support();
    if (groups_.empty() || groups_.back().support != s)
      groups_.push_back(SupportGroup{std::move(s), {}});
    groups_.back().members.push_back(pos);
  }
}

std::optional<std::size_t>
BasisSpec::find(const MultiIndex& j) const
{
  auto it =
    std::lower_bound(selected_.begin(), selected_.end(), j, canonical_less);
  if (it != selected_.end() && *it == j)
    return static_cast<std::size_t>(it - selected_.begin());
  return std::nullopt;
}

BasisSpec
BasisSpec::without(const std::vector<std::size_t>& positions) const
{
  std::vector<bool> drop(selected_.size(), false);
  for (std::size_t p : positions)
    if (p < drop.size())
      drop[p] = true;
  std::vector<MultiIndex> kept;
  for (std::size_t p = 0; p < selected_.size(); ++p)
    if (!drop[p] || selected_[p].is_constant())
      kept.push_back(selected_[p]);
  return BasisSpec(families_, std::move(kept), level_orders_);
}

BasisSpec
BasisSpec::restricted_to(const Subset& keep) const
{
  std::vector<MultiIndex> kept;
  for (const SupportGroup& g : groups_)
    if (is_subset(g.support, keep))
      for (std::size_t p : g.members)
        kept.push_back(selected_[p]);
  return BasisSpec(families_, std::move(kept), level_orders_);
}

namespace {

int
effective_order(const Family1D& family, int order, OrderCap cap)
{
  if (order <= family.max_order())
    return order;
  if (cap == OrderCap::clamp_to_family)
    return family.max_order();
  if (family.kind() == FamilyKind::discrete)
    throw DomainError("order " + std::to_string(order) +
                      " exceeds the capacity of a discrete coordinate with " +
                      std::to_string(family.num_values()) + " values");
  throw DomainError("order " + std::to_string(order) +
                    " exceeds the family max order " +
                    std::to_string(family.max_order()));
}

// Appends every order vector over `support` with 1 <= j_i <= caps[k], in
// lexicographic order.
void
append_products(std::size_t d,
                const Subset& support,
                const std::vector<int>& caps,
                std::vector<MultiIndex>& out)
{
  if (std::any_of(caps.begin(), caps.end(), [](int c) { return c < 1; }))
    return;
  std::vector<int> cur(support.size(), 1);
  while (true) {
    std::vector<int> orders(d, 0);
    for (std::size_t k = 0; k < support.size(); ++k)
      orders[support[k]] = cur[k];
    out.emplace_back(std::move(orders));
    std::size_t k = support.size();
    while (k > 0) {
      --k;
      if (cur[k] < caps[k]) {
        ++cur[k];
        std::fill(cur.begin() + k + 1, cur.end(), 1);
        break;
      }
      if (k == 0)
        return;
    }
    if (support.empty())
      return;
  }
}

} // namespace

BasisSpec
build_full(std::vector<Family1D> families,
           const std::vector<int>& level_orders,
           OrderCap cap)
{
  const std::size_t d = families.size();
  if (level_orders.size() != d + 1)
    throw DomainError("build_full: level_orders needs an entry for every level 0.." +
                      std::to_string(d));
  for (int m : level_orders)
    if (m < 0)
      throw DomainError("build_full: negative level order");

  std::vector<MultiIndex> selected;
  std::vector<int> recorded(level_orders);
  recorded[0] = 0;
  for (std::size_t level = 1; level <= d; ++level) {
    const int m = level_orders[level];
    if (m == 0)
      continue;
    // combinations of `level` coordinates, lexicographic
    Subset comb(level);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    while (true) {
      std::vector<int> caps;
      for (std::size_t i : comb)
        caps.push_back(effective_order(families[i], m, cap));
      append_products(d, comb, caps, selected);

      std::size_t k = level;
      while (k > 0 && comb[k - 1] == d - level + (k - 1))
        --k;
      if (k == 0)
        break;
      ++comb[k - 1];
      for (std::size_t t = k; t < level; ++t)
        comb[t] = comb[t - 1] + 1;
    }
  }
  return BasisSpec(std::move(families), std::move(selected), std::move(recorded));
}

BasisSpec
build_sparse(std::vector<Family1D> families,
             const std::vector<Subset>& whitelist,
             int order)
{
  const std::size_t d = families.size();
  if (order < 0)
    throw DomainError("build_sparse: negative order");
  std::set<Subset> seen;
  std::vector<MultiIndex> selected;
  for (Subset c : whitelist) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.empty())
      throw DomainError("build_sparse: empty subset in whitelist");
    if (c.back() >= d)
      throw DomainError("build_sparse: coordinate " + std::to_string(c.back()) +
                        " out of range for dimension " + std::to_string(d));
    if (!seen.insert(c).second || order == 0)
      continue;
    std::vector<int> caps;
    for (std::size_t i : c)
      caps.push_back(effective_order(families[i], order, OrderCap::strict));
    append_products(d, c, caps, selected);
  }
  return BasisSpec(std::move(families), std::move(selected));
}

double
eval_function(const BasisSpec& spec, const MultiIndex& j, PointView x)
{
  if (j.dimension() != spec.dimension() || x.size() != spec.dimension())
    throw DomainError("eval_function: dimension mismatch");
  double product = 1.0;
  for (std::size_t i = 0; i < j.dimension(); ++i) {
    if (j[i] == 0)
      continue;
    if (!x[i])
      throw MissingCoordinateError(
        i, "coordinate " + std::to_string(i) + " is missing but required by " +
             j.to_string());
    product *= spec.family(i).eval(j[i], *x[i]);
  }
  return product;
}

PointEvaluator::PointEvaluator(const BasisSpec& spec, PointView x)
{
  const std::size_t d = spec.dimension();
  if (x.size() != d)
    throw DomainError("point dimension " + std::to_string(x.size()) +
                      " does not match basis dimension " + std::to_string(d));
  known_.resize(d);
  offsets_.resize(d);
  std::size_t total = 0;
  for (std::size_t i = 0; i < d; ++i) {
    offsets_[i] = total;
    total += spec.family(i).max_order() + 1;
  }
  values_.assign(total, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    known_[i] = x[i].has_value();
    if (known_[i])
      spec.family(i).eval_all(*x[i], values_.data() + offsets_[i]);
  }
}

double
PointEvaluator::operator()(const MultiIndex& j) const
{
  double product = 1.0;
  for (std::size_t i = 0; i < j.dimension(); ++i) {
    if (j[i] == 0)
      continue;
    if (!known_[i])
      throw MissingCoordinateError(
        i, "coordinate " + std::to_string(i) + " is missing but required by " +
             j.to_string());
    product *= value(i, j[i]);
  }
  return product;
}

std::optional<double>
PointEvaluator::try_eval(const MultiIndex& j) const
{
  double product = 1.0;
  for (std::size_t i = 0; i < j.dimension(); ++i) {
    if (j[i] == 0)
      continue;
    if (!known_[i])
      return std::nullopt;
    product *= value(i, j[i]);
  }
  return product;
}

} // namespace hcr
