#include "hcr/estimator.hpp"

#include "hcr/errors.hpp"

#include <cmath>
#include <limits>

namespace hcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

Model::Model(BasisSpec spec)
  : spec_(std::move(spec))
  , coefficients_(spec_.size(), 0.0)
  , uncertainty_(spec_.size(), kInf)
  , flags_(spec_.size(), flag_no_evidence)
{
  coefficients_[0] = 1.0;
  uncertainty_[0] = 0.0;
  flags_[0] = flag_none;
  for (const SupportGroup& g : spec_.groups())
    evidence_[g.support] = 0;
  transforms_.assign(dimension(), Transform::unit());
  for (std::size_t i = 0; i < dimension(); ++i)
    names_.push_back("x" + std::to_string(i + 1));
}

void
Model::set_coefficient(std::size_t pos, double value)
{
  if (pos == 0 && value != 1.0)
    throw DomainError("the constant coefficient is fixed at 1");
  coefficients_[pos] = value;
}

std::size_t
Model::evidence(const Subset& c) const
{
  auto it = evidence_.find(c);
  return it == evidence_.end() ? 0 : it->second;
}

void
Model::set_transforms(std::vector<Transform> transforms)
{
  if (transforms.size() != dimension())
    throw DomainError("transform count does not match model dimension");
  transforms_ = std::move(transforms);
}

void
Model::set_names(std::vector<std::string> names)
{
  if (names.size() != dimension())
    throw DomainError("name count does not match model dimension");
  names_ = std::move(names);
}

Model
Model::restricted(BasisSpec sub) const
{
  Model out(std::move(sub));
  for (std::size_t p = 0; p < out.size(); ++p) {
    auto src = spec_.find(out.spec().selected()[p]);
    if (!src)
      throw DomainError("restricted: basis is not a subset of the model basis");
    out.coefficients_[p] = coefficients_[*src];
    out.uncertainty_[p] = uncertainty_[*src];
    out.flags_[p] = flags_[*src];
  }
  out.evidence_.clear();
  for (const SupportGroup& g : out.spec().groups())
    out.evidence_[g.support] = evidence(g.support);
  out.transforms_ = transforms_;
  out.names_ = names_;
  return out;
}

Model
fit(const BasisSpec& spec, const Dataset& data)
{
  if (data.dimension() != spec.dimension())
    throw DomainError("fit: dataset dimension " + std::to_string(data.dimension()) +
                      " does not match basis dimension " +
                      std::to_string(spec.dimension()));
  const auto& groups = spec.groups();
  const auto& selected = spec.selected();
  std::vector<std::size_t> counts(groups.size(), 0);
  std::vector<double> sums(spec.size(), 0.0);

  std::vector<PointEvaluator> evaluators;
  evaluators.reserve(data.size());
  for (const Record& r : data)
    evaluators.emplace_back(spec, r);

  auto covered = [&](const PointEvaluator& ev, const Subset& c) {
    for (std::size_t i : c)
      if (!ev.known(i))
        return false;
    return true;
  };

  for (const PointEvaluator& ev : evaluators)
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!covered(ev, groups[g].support))
        continue;
      ++counts[g];
      for (std::size_t p : groups[g].members)
        sums[p] += ev(selected[p]);
    }

  Model model(spec);
  std::vector<double> means(spec.size(), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    model.set_evidence(groups[g].support, counts[g]);
    if (counts[g] == 0)
      continue;
    for (std::size_t p : groups[g].members)
      means[p] = sums[p] / static_cast<double>(counts[g]);
  }

  // second pass: squared deviations
  std::vector<double> squares(spec.size(), 0.0);
  for (const PointEvaluator& ev : evaluators)
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!covered(ev, groups[g].support))
        continue;
      for (std::size_t p : groups[g].members) {
        const double dev = ev(selected[p]) - means[p];
        squares[p] += dev * dev;
      }
    }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t n = counts[g];
    for (std::size_t p : groups[g].members) {
      if (p == 0)
        continue;
      model.set_coefficient(p, means[p]);
      if (n == 0) {
        model.set_flags(p, flag_no_evidence);
        model.set_uncertainty(p, kInf);
      } else if (n == 1) {
        model.set_flags(p, flag_uncertainty_undefined);
        model.set_uncertainty(p, kInf);
      } else {
        model.set_flags(p, flag_none);
        const double variance = squares[p] / static_cast<double>(n - 1);
        model.set_uncertainty(p, std::sqrt(variance / static_cast<double>(n)));
      }
    }
  }
  return model;
}

void
adapt_in_place(Model& model, const Record& record, double lambda)
{
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("adapt: learning rate must lie in (0,1)");
  const BasisSpec& spec = model.spec();
  const PointEvaluator ev(spec, record);
  for (const SupportGroup& g : spec.groups()) {
    bool covered = true;
    for (std::size_t i : g.support)
      covered = covered && ev.known(i);
    if (!covered)
      continue;
    model.set_evidence(g.support, model.evidence(g.support) + 1);
    for (std::size_t p : g.members) {
      if (p == 0)
        continue;
      const double a = model.coefficient(p);
      model.set_coefficient(p, (1.0 - lambda) * a + lambda * ev(spec.selected()[p]));
      model.set_flags(p, model.flags(p) & ~flag_no_evidence);
    }
  }
}

Model
adapt(Model model, const Record& record, double lambda)
{
  adapt_in_place(model, record, lambda);
  return model;
}

LearningRateSchedule::LearningRateSchedule(std::size_t horizon, double start, double end)
  : horizon_(horizon)
  , start_(start)
  , end_(end)
{
  if (!(start > 0.0 && start < 1.0 && end > 0.0 && end < 1.0))
    throw DomainError("learning rates must lie in (0,1)");
}

double
LearningRateSchedule::operator()(std::size_t step) const
{
  if (horizon_ <= 1 || step >= horizon_ - 1)
    return horizon_ <= 1 ? start_ : end_;
  const double t = static_cast<double>(step) / static_cast<double>(horizon_ - 1);
  return start_ * std::pow(end_ / start_, t);
}

OnlineEstimator::OnlineEstimator(Model initial)
  : current_(std::make_shared<const Model>(std::move(initial)))
{}

std::shared_ptr<const Model>
OnlineEstimator::snapshot() const
{
  std::lock_guard lock(mutex_);
  return current_;
}

void
OnlineEstimator::update(const Record& record, double lambda)
{
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<Model>(*current_);
  adapt_in_place(*next, record, lambda);
  current_ = std::move(next);
}

PruneResult
prune(const Model& model, double threshold_sigmas)
{
  PruneResult result{ model, {} };
  if (!(threshold_sigmas > 0.0))
    return result;
  std::vector<std::size_t> drop;
  for (std::size_t p = 1; p < model.size(); ++p)
    if (std::abs(model.coefficient(p)) < threshold_sigmas * model.uncertainty(p)) {
      drop.push_back(p);
      result.removed.push_back(model.spec().selected()[p]);
    }
  if (drop.empty())
    return result;
  result.model = model.restricted(model.spec().without(drop));
  return result;
}

} // namespace hcr
