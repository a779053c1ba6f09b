#include "hcr/density.hpp"

#include "hcr/errors.hpp"
#include "hcr/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hcr {

double
evaluate(const Model& model, PointView x)
{
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!x[i])
      throw MissingCoordinateError(
        i, "evaluate: coordinate " + std::to_string(i) +
             " is missing; use conditional_slice or evaluate_marginal");
  const PointEvaluator ev(model.spec(), x);
  const auto& selected = model.spec().selected();
  double s = 0.0;
  for (std::size_t p = 0; p < model.size(); ++p)
    s += model.coefficient(p) * ev(selected[p]);
  return s;
}

double
evaluate_marginal(const Model& model, PointView x)
{
  const PointEvaluator ev(model.spec(), x);
  const auto& selected = model.spec().selected();
  double s = 0.0;
  for (const SupportGroup& g : model.spec().groups()) {
    bool covered = true;
    for (std::size_t i : g.support)
      covered = covered && ev.known(i);
    if (!covered)
      continue;
    for (std::size_t p : g.members)
      s += model.coefficient(p) * ev(selected[p]);
  }
  return s;
}

double
total_mass(const Model& model)
{
  return model.coefficient(0);
}

double
clamp(double value, double epsilon)
{
  if (!(epsilon > 0.0))
    throw DomainError("clamp: epsilon must be positive");
  return std::max(value, epsilon);
}

Model
marginalize(const Model& model, const Subset& keep)
{
  Subset k(keep);
  std::sort(k.begin(), k.end());
  return model.restricted(model.spec().restricted_to(k));
}

// ---------------------------------------------------------------------------

ConditionalSlice::ConditionalSlice(std::size_t free_coordinate,
                                   Family1D family,
                                   std::vector<double> numerator,
                                   double denominator)
  : free_(free_coordinate)
  , family_(std::move(family))
  , numerator_(std::move(numerator))
  , denominator_(denominator)
{
  if (numerator_.size() != static_cast<std::size_t>(family_.max_order() + 1))
    throw DomainError("slice numerator size does not match the family");
  if (!(denominator_ > 0.0))
    throw NonpositiveMassError(denominator_);
}

double
ConditionalSlice::operator()(double x) const
{
  std::vector<double> f(numerator_.size());
  family_.eval_all(x, f.data());
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    s += numerator_[j] * f[j];
  return s / denominator_;
}

double
ConditionalSlice::derivative(double x) const
{
  double s = 0.0;
  for (std::size_t j = 1; j < numerator_.size(); ++j)
    if (numerator_[j] != 0.0)
      s += numerator_[j] * family_.derivative(static_cast<int>(j), x);
  return s / denominator_;
}

ConditionalSlice
conditional_slice(const Model& model, PointView known, std::size_t free)
{
  const BasisSpec& spec = model.spec();
  if (known.size() != spec.dimension())
    throw DomainError("conditional_slice: point dimension mismatch");
  if (free >= spec.dimension())
    throw DomainError("conditional_slice: free coordinate out of range");
  if (known[free])
    throw DomainError("conditional_slice: the free coordinate " +
                      std::to_string(free) + " must not be fixed");

  const PointEvaluator ev(spec, known);
  const auto& selected = spec.selected();
  std::vector<double> numerator(spec.family(free).max_order() + 1, 0.0);
  for (const SupportGroup& g : spec.groups()) {
    bool usable = true;
    for (std::size_t i : g.support)
      usable = usable && (i == free || ev.known(i));
    if (!usable)
      continue;
    for (std::size_t p : g.members) {
      const MultiIndex& j = selected[p];
      double factor = model.coefficient(p);
      for (std::size_t i : g.support)
        if (i != free)
          factor *= ev.value(i, j[i]);
      numerator[j[free]] += factor;
    }
  }
  const double denominator = numerator[0];
  if (!(denominator > 0.0))
    throw NonpositiveMassError(denominator);
  return ConditionalSlice(free, spec.family(free), std::move(numerator), denominator);
}

// ---------------------------------------------------------------------------

namespace {

// A continuous slice as an explicit function of x.
class Shape
{
public:
  explicit Shape(const ConditionalSlice& slice)
    : kind_(slice.family().kind())
  {
    const auto& num = slice.numerator();
    const double den = slice.denominator();
    if (kind_ == FamilyKind::legendre) {
      for (std::size_t j = 0; j < num.size(); ++j)
        if (num[j] != 0.0)
          poly_ += Polynomial(legendre_power_coefficients(static_cast<int>(j))) *
                   (num[j] / den);
      dpoly_ = poly_.derivative();
      prim0_ = poly_.antiderivative();
      prim1_ = (Polynomial({ 0.0, 1.0 }) * poly_).antiderivative();
    } else {
      c0_ = num[0] / den;
      for (std::size_t j = 1; j < num.size(); ++j)
        if (num[j] != 0.0)
          terms_.push_back(Term{ std::numbers::sqrt2 * num[j] / den,
                                 2.0 * std::numbers::pi * ((j + 1) / 2),
                                 j % 2 == 1 });
    }
  }

  double value(double x) const
  {
    if (kind_ == FamilyKind::legendre)
      return poly_(x);
    double s = c0_;
    for (const Term& t : terms_)
      s += t.amp * (t.is_sin ? std::sin(t.w * x) : std::cos(t.w * x));
    return s;
  }

  double slope(double x) const
  {
    if (kind_ == FamilyKind::legendre)
      return dpoly_(x);
    double s = 0.0;
    for (const Term& t : terms_)
      s += t.amp * t.w * (t.is_sin ? std::cos(t.w * x) : -std::sin(t.w * x));
    return s;
  }

  // integral of p over [a, b]
  double mass(double a, double b) const
  {
    if (kind_ == FamilyKind::legendre)
      return prim0_(b) - prim0_(a);
    return primitive0(b) - primitive0(a);
  }

  // integral of x p(x) over [a, b]
  double first_moment(double a, double b) const
  {
    if (kind_ == FamilyKind::legendre)
      return prim1_(b) - prim1_(a);
    return primitive1(b) - primitive1(a);
  }

  // interior critical points, ascending
  std::vector<double> critical_points() const
  {
    std::vector<double> out;
    if (kind_ == FamilyKind::legendre) {
      for (double r : dpoly_.roots_in(0.0, 1.0, 1e-13))
        if (r > 0.0 && r < 1.0)
          out.push_back(r);
      return out;
    }
    if (terms_.empty())
      return out;
    double max_w = 0.0;
    for (const Term& t : terms_)
      max_w = std::max(max_w, t.w);
    const int n = 64 * static_cast<int>(max_w / (2.0 * std::numbers::pi) + 1.0);
    double prev_x = 0.0, prev = slope(0.0);
    for (int k = 1; k <= n; ++k) {
      const double x = static_cast<double>(k) / n;
      const double s = slope(x);
      if (prev == 0.0 && prev_x > 0.0) {
        if (out.empty() || prev_x - out.back() > 1e-12)
          out.push_back(prev_x);
      } else if ((prev < 0.0 && s > 0.0) || (prev > 0.0 && s < 0.0)) {
        double a = prev_x, b = x, fa = prev;
        for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = slope(m);
          if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        out.push_back(0.5 * (a + b));
      }
      prev_x = x;
      prev = s;
    }
    while (!out.empty() && out.back() >= 1.0)
      out.pop_back();
    return out;
  }

private:
  struct Term
  {
    double amp;
    double w;
    bool is_sin;
  };

  double primitive0(double x) const
  {
    double s = c0_ * x;
    for (const Term& t : terms_)
      s += t.amp * (t.is_sin ? -std::cos(t.w * x) / t.w : std::sin(t.w * x) / t.w);
    return s;
  }

  double primitive1(double x) const
  {
    double s = 0.5 * c0_ * x * x;
    for (const Term& t : terms_) {
      const double c = std::cos(t.w * x), sn = std::sin(t.w * x);
      s += t.amp * (t.is_sin ? sn / (t.w * t.w) - x * c / t.w
                             : c / (t.w * t.w) + x * sn / t.w);
    }
    return s;
  }

  FamilyKind kind_;
  Polynomial poly_, dpoly_, prim0_, prim1_;
  double c0_ = 0.0;
  std::vector<Term> terms_;
};

// Candidate extremum locations of a continuous slice: ends and critical points.
std::vector<double>
extremum_candidates(const Shape& shape)
{
  std::vector<double> xs{ 0.0 };
  for (double c : shape.critical_points())
    xs.push_back(c);
  xs.push_back(1.0);
  return xs;
}

std::vector<double>
grid_values(const ConditionalSlice& slice)
{
  std::vector<double> v;
  for (double x : slice.family().grid())
    v.push_back(slice(x));
  return v;
}

} // namespace

double
slice_minimum(const ConditionalSlice& slice)
{
  double m = std::numeric_limits<double>::infinity();
  if (!slice.family().is_continuous()) {
    for (double v : grid_values(slice))
      m = std::min(m, v);
    return m;
  }
  const Shape shape(slice);
  for (double x : extremum_candidates(shape))
    m = std::min(m, shape.value(x));
  return m;
}

SliceMoments
expected_value(const ConditionalSlice& slice)
{
  SliceMoments out;
  const Family1D& family = slice.family();
  const auto& num = slice.numerator();
  double m1 = 0.0, m2 = 0.0;
  if (family.is_continuous()) {
    for (std::size_t j = 0; j < num.size(); ++j) {
      if (num[j] == 0.0)
        continue;
      m1 += num[j] * integrate_moment(family, static_cast<int>(j), 1);
      m2 += num[j] * integrate_moment(family, static_cast<int>(j), 2);
    }
    m1 /= slice.denominator();
    m2 /= slice.denominator();
  } else {
    const double w = family.grid_weight();
    for (double x : family.grid()) {
      const double p = slice(x);
      m1 += w * x * p;
      m2 += w * x * x * p;
    }
  }
  out.mean = m1;
  out.variance = std::max(0.0, m2 - m1 * m1);
  if (slice_minimum(slice) < 0.0) {
    out.negative_region = true;
    out.mean = std::clamp(out.mean, 0.0, 1.0);
  }
  return out;
}

namespace {

std::vector<Cluster>
merge_small(std::vector<Cluster> clusters, double min_mass)
{
  while (clusters.size() > 1) {
    std::size_t smallest = 0;
    for (std::size_t k = 1; k < clusters.size(); ++k)
      if (clusters[k].mass < clusters[smallest].mass)
        smallest = k;
    if (!(clusters[smallest].mass < min_mass))
      break;
    std::size_t target;
    if (smallest == 0)
      target = 1;
    else if (smallest + 1 == clusters.size())
      target = smallest - 1;
    else {
      const double dl = std::abs(clusters[smallest].mean - clusters[smallest - 1].mean);
      const double dr = std::abs(clusters[smallest + 1].mean - clusters[smallest].mean);
      target = dl <= dr ? smallest - 1 : smallest + 1;
    }
    Cluster& t = clusters[target];
    const Cluster& s = clusters[smallest];
    const double mass = t.mass + s.mass;
    if (mass != 0.0)
      t.mean = (t.mass * t.mean + s.mass * s.mean) / mass;
    t.mass = mass;
    t.lo = std::min(t.lo, s.lo);
    t.hi = std::max(t.hi, s.hi);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
  return clusters;
}

std::vector<Cluster>
continuous_clusters(const ConditionalSlice& slice)
{
  const Shape shape(slice);
  const std::vector<double> crit = shape.critical_points();
  std::vector<double> knots{ 0.0 };
  knots.insert(knots.end(), crit.begin(), crit.end());
  knots.push_back(1.0);

  std::vector<double> cuts{ 0.0 };
  for (std::size_t k = 0; k < crit.size(); ++k) {
    const double left = shape.slope(0.5 * (knots[k] + knots[k + 1]));
    const double right = shape.slope(0.5 * (knots[k + 1] + knots[k + 2]));
    if (left < 0.0 && right > 0.0)
      cuts.push_back(crit[k]);
  }
  cuts.push_back(1.0);

  std::vector<Cluster> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Cluster c;
    c.lo = cuts[k];
    c.hi = cuts[k + 1];
    c.mass = shape.mass(c.lo, c.hi);
    const double moment = shape.first_moment(c.lo, c.hi);
    c.mean = c.mass != 0.0 ? std::clamp(moment / c.mass, c.lo, c.hi)
                           : 0.5 * (c.lo + c.hi);
    out.push_back(c);
  }
  return out;
}

std::vector<Cluster>
discrete_clusters(const ConditionalSlice& slice)
{
  const std::vector<double> xs = slice.family().grid();
  const std::vector<double> v = grid_values(slice);
  const double w = slice.family().grid_weight();
  const std::size_t n = xs.size();

  std::vector<std::size_t> cuts{ 0 };
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (v[k] < v[k - 1] && v[k] <= v[k + 1])
      cuts.push_back(k);
  cuts.push_back(n - 1);

  std::vector<Cluster> out;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const std::size_t a = cuts[c], b = cuts[c + 1];
    Cluster cl;
    cl.lo = xs[a];
    cl.hi = xs[b];
    double mass = 0.0, moment = 0.0;
    for (std::size_t k = a; k <= b; ++k) {
      // interior cut points are shared half/half between neighbours
      double share = 1.0;
      if ((k == a && c > 0) || (k == b && c + 2 < cuts.size()))
        share = 0.5;
      mass += share * w * v[k];
      moment += share * w * v[k] * xs[k];
    }
    cl.mass = mass;
    cl.mean = mass != 0.0 ? std::clamp(moment / mass, cl.lo, cl.hi)
                          : 0.5 * (cl.lo + cl.hi);
    out.push_back(cl);
  }
  return out;
}

} // namespace

std::vector<Cluster>
modes_and_clusters(const ConditionalSlice& slice, double min_mass)
{
  std::vector<Cluster> clusters = slice.family().is_continuous()
                                    ? continuous_clusters(slice)
                                    : discrete_clusters(slice);
  clusters = merge_small(std::move(clusters), min_mass);
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) {
                     if (a.mass != b.mass)
                       return a.mass > b.mass;
                     return a.lo < b.lo;
                   });
  return clusters;
}

Mode
top_mode(const ConditionalSlice& slice)
{
  std::vector<double> xs;
  std::vector<double> vals;
  if (slice.family().is_continuous()) {
    const Shape shape(slice);
    xs = extremum_candidates(shape);
    for (double x : xs)
      vals.push_back(shape.value(x));
  } else {
    xs = slice.family().grid();
    vals = grid_values(slice);
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double v : vals)
    top = std::max(top, v);
  const double tol = 1e-12 * std::max(1.0, std::abs(top));
  Mode mode;
  bool found = false;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (vals[k] < top - tol)
      continue;
    if (!found) {
      mode.location = xs[k];
      mode.density = vals[k];
      found = true;
    } else if (xs[k] - mode.location > 1e-9) {
      mode.tie = true;
    }
  }
  return mode;
}

// ---------------------------------------------------------------------------

namespace {

struct Branch
{
  Record values;
  double weight;
  std::vector<double> variance;
  bool negative_region = false;
  bool tie = false;
};

void
impute_branch(const Model& model,
              Branch branch,
              ImputePolicy policy,
              std::vector<Completion>& out)
{
  const std::size_t d = model.dimension();
  while (true) {
    std::optional<std::size_t> best;
    std::optional<ConditionalSlice> best_slice;
    SliceMoments best_moments;
    std::optional<NonpositiveMassError> last_error;
    bool any_missing = false;

    for (std::size_t i = 0; i < d; ++i) {
      if (branch.values[i])
        continue;
      any_missing = true;
      try {
        ConditionalSlice s = conditional_slice(model, branch.values, i);
        SliceMoments m = expected_value(s);
        if (!best || m.variance < best_moments.variance) {
          best = i;
          best_moments = m;
          best_slice.emplace(std::move(s));
        }
      } catch (const NonpositiveMassError& e) {
        last_error.emplace(e);
      }
    }
    if (!any_missing) {
      out.push_back(Completion{ std::move(branch.values), branch.weight,
                                std::move(branch.variance), branch.negative_region,
                                branch.tie });
      return;
    }
    if (!best)
      throw *last_error;

    const std::size_t i = *best;
    const Family1D& family = model.spec().family(i);
    branch.variance[i] = best_moments.variance;
    branch.negative_region = branch.negative_region || best_moments.negative_region;

    switch (policy) {
      case ImputePolicy::expected:
        branch.values[i] = family.snap(std::clamp(best_moments.mean, 0.0, 1.0));
        break;
      case ImputePolicy::top_mode: {
        const Mode m = top_mode(*best_slice);
        branch.values[i] = family.snap(m.location);
        branch.tie = branch.tie || m.tie;
        break;
      }
      case ImputePolicy::cluster_split: {
        const std::vector<Cluster> clusters = modes_and_clusters(*best_slice);
        if (clusters.size() == 1) {
          branch.values[i] = family.snap(std::clamp(clusters[0].mean, 0.0, 1.0));
          break;
        }
        double total = 0.0;
        for (const Cluster& c : clusters)
          total += std::max(c.mass, 0.0);
        for (const Cluster& c : clusters) {
          Branch child = branch;
          child.values[i] = family.snap(std::clamp(c.mean, 0.0, 1.0));
          child.weight *= total > 0.0 ? std::max(c.mass, 0.0) / total
                                      : 1.0 / clusters.size();
          impute_branch(model, std::move(child), policy, out);
        }
        return;
      }
    }
  }
}

} // namespace

std::vector<Completion>
impute(const Model& model, const Record& record, ImputePolicy policy)
{
  if (record.size() != model.dimension())
    throw DomainError("impute: record dimension mismatch");
  if (std::all_of(record.begin(), record.end(),
                  [](const auto& v) { return v.has_value(); }))
    throw DomainError("impute: record has no missing coordinate");
  Branch root{ record, 1.0,
               std::vector<double>(record.size(),
                                   std::numeric_limits<double>::quiet_NaN()) };
  std::vector<Completion> out;
  impute_branch(model, std::move(root), policy, out);
  double total = 0.0;
  for (const Completion& c : out)
    total += c.weight;
  if (total > 0.0)
    for (Completion& c : out)
      c.weight /= total;
  return out;
}

} // namespace hcr
