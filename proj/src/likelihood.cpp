#include "hcr/likelihood.hpp"

#include "hcr/density.hpp"
#include "hcr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hcr {

namespace {

// Marginal density of every record; records with no known coordinate get 1.
std::vector<double>
record_densities(const Model& model, const Dataset& data)
{
  std::vector<double> rho(data.size());
  for (std::size_t k = 0; k < data.size(); ++k)
    rho[k] = evaluate_marginal(model, data[k]);
  return rho;
}

void
require_positive(const std::vector<double>& rho,
                 const std::vector<bool>& used,
                 double floor)
{
  std::vector<std::size_t> bad;
  std::vector<double> values;
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (used[k] && !(rho[k] > floor)) {
      bad.push_back(k);
      values.push_back(rho[k]);
    }
  if (!bad.empty())
    throw NonpositiveDensityError(std::move(bad), std::move(values));
}

double
penalty(const Model& model)
{
  double s = 0.0;
  for (std::size_t p = 1; p < model.size(); ++p)
    s += model.coefficient(p) * model.coefficient(p);
  return s;
}

} // namespace

double
log_likelihood(const Model& model, const Dataset& data)
{
  std::vector<bool> complete(data.size());
  std::size_t n = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    complete[k] = data.complete(k);
    n += complete[k];
  }
  if (n == 0)
    throw DataError("log_likelihood: no complete records");
  std::vector<double> rho(data.size(), 1.0);
  for (std::size_t k = 0; k < data.size(); ++k)
    if (complete[k])
      rho[k] = evaluate(model, data[k]);
  require_positive(rho, complete, 0.0);
  double s = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k)
    if (complete[k])
      s += std::log(rho[k]);
  return s / static_cast<double>(n);
}

Gradient
gradient(const Model& model, const Dataset& data)
{
  const BasisSpec& spec = model.spec();
  if (data.dimension() != spec.dimension())
    throw DomainError("gradient: dataset dimension mismatch");

  const std::vector<double> rho = record_densities(model, data);
  std::vector<bool> used(data.size(), false);
  for (std::size_t k = 0; k < data.size(); ++k)
    for (const SupportGroup& g : spec.groups()) {
      if (g.support.empty())
        continue;
      bool covered = true;
      for (std::size_t i : g.support)
        covered = covered && data[k][i].has_value();
      if (covered) {
        used[k] = true;
        break;
      }
    }
  require_positive(rho, used, 0.0);

  Gradient out;
  out.values.assign(spec.size(), 0.0);
  out.flags.assign(spec.size(), flag_none);
  std::vector<std::size_t> counts(spec.groups().size(), 0);
  const auto& selected = spec.selected();
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!used[k])
      continue;
    const PointEvaluator ev(spec, data[k]);
    for (std::size_t g = 1; g < spec.groups().size(); ++g) {
      const SupportGroup& group = spec.groups()[g];
      bool covered = true;
      for (std::size_t i : group.support)
        covered = covered && ev.known(i);
      if (!covered)
        continue;
      ++counts[g];
      for (std::size_t p : group.members)
        out.values[p] += ev(selected[p]) / rho[k];
    }
  }
  for (std::size_t g = 0; g < spec.groups().size(); ++g)
    for (std::size_t p : spec.groups()[g].members) {
      if (p == 0)
        continue;
      if (counts[g] == 0)
        out.flags[p] = flag_no_evidence;
      else
        out.values[p] /= static_cast<double>(counts[g]);
    }
  return out;
}

RefineResult
refine(const Model& model, const Dataset& data, const RefineConfig& config)
{
  if (!(config.step_size > 0.0))
    throw DomainError("refine: step_size must be positive");
  if (!(config.backtrack_factor > 0.0 && config.backtrack_factor < 1.0))
    throw DomainError("refine: backtrack_factor must lie in (0,1)");
  if (config.ridge < 0.0 || config.positivity_margin < 0.0)
    throw DomainError("refine: ridge and positivity_margin must be non-negative");

  std::vector<bool> usable(data.size());
  bool any_complete = false;
  for (std::size_t k = 0; k < data.size(); ++k) {
    usable[k] = !known_set(data[k]).empty();
    any_complete = any_complete || data.complete(k);
  }
  require_positive(record_densities(model, data), usable, 0.0);

  auto loglik = [&](const Model& m) {
    return any_complete ? log_likelihood(m, data) : 0.0;
  };

  RefineResult result{ model, {}, {}, 0, false };
  double f = loglik(result.model);
  double objective = f - config.ridge * penalty(result.model);
  result.log_likelihood.push_back(f);
  result.objective.push_back(objective);

  constexpr int kMaxBacktracks = 60;
  for (std::size_t step = 0; step < config.steps; ++step) {
    const Gradient g = gradient(result.model, data);
    std::vector<double> direction(result.model.size(), 0.0);
    bool nonzero = false;
    for (std::size_t p = 1; p < direction.size(); ++p) {
      direction[p] = g.values[p] - 2.0 * config.ridge * result.model.coefficient(p);
      nonzero = nonzero || direction[p] != 0.0;
    }
    if (!nonzero) {
      result.converged = true;
      break;
    }

    double eta = config.step_size;
    bool accepted = false;
    bool positivity_failed = false;
    std::vector<std::size_t> offenders;
    std::vector<double> offender_values;
    for (int attempt = 0; attempt <= kMaxBacktracks; ++attempt, eta *= config.backtrack_factor) {
      Model candidate = result.model;
      for (std::size_t p = 1; p < candidate.size(); ++p)
        candidate.set_coefficient(p, candidate.coefficient(p) + eta * direction[p]);

      const std::vector<double> rho = record_densities(candidate, data);
      offenders.clear();
      offender_values.clear();
      for (std::size_t k = 0; k < rho.size(); ++k)
        if (usable[k] && (rho[k] < config.positivity_margin || !(rho[k] > 0.0))) {
          offenders.push_back(k);
          offender_values.push_back(rho[k]);
        }
      positivity_failed = !offenders.empty();
      if (positivity_failed)
        continue;

      const double cf = loglik(candidate);
      const double cobj = cf - config.ridge * penalty(candidate);
      if (cobj < objective)
        continue;
      result.model = std::move(candidate);
      f = cf;
      objective = cobj;
      accepted = true;
      break;
    }

    if (!accepted) {
      if (positivity_failed) {
        std::ostringstream os;
        os << "refine: positivity could not be kept after " << kMaxBacktracks
           << " step reductions at step " << step << "; records below margin:";
        for (std::size_t i = 0; i < std::min<std::size_t>(offenders.size(), 10); ++i)
          os << " #" << offenders[i] << "=" << offender_values[i];
        throw NumericError(os.str());
      }
      result.converged = true;
      break;
    }
    ++result.steps_taken;
    result.log_likelihood.push_back(f);
    result.objective.push_back(objective);
  }
  return result;
}

Model
repair_negative(const Model& model,
                PointView witness,
                RepairStrategy strategy,
                double margin)
{
  if (!(margin >= 0.0 && margin < 1.0))
    throw DomainError("repair_negative: margin must lie in [0,1)");
  const double rho = evaluate(model, witness);
  if (rho >= margin)
    throw DomainError("repair_negative: witness density " + format_double(rho) +
                      " is already >= margin " + format_double(margin));

  const PointEvaluator ev(model.spec(), witness);
  const auto& selected = model.spec().selected();
  std::vector<double> contribution(model.size(), 0.0);
  for (std::size_t p = 1; p < model.size(); ++p)
    contribution[p] = model.coefficient(p) * ev(selected[p]);

  Model out = model;
  if (strategy == RepairStrategy::rescale_all) {
    // 1 + t S = margin with S = rho - 1 < 0
    const double s = rho - 1.0;
    double t = (1.0 - margin) / (-s);
    auto apply = [&](double factor) {
      for (std::size_t p = 1; p < out.size(); ++p)
        out.set_coefficient(p, model.coefficient(p) * factor);
    };
    apply(t);
    for (int guard = 0; guard < 64 && evaluate(out, witness) < margin; ++guard) {
      t = std::nextafter(t, 0.0);
      apply(t);
    }
    return out;
  }

  std::vector<bool> touched(model.size(), false);
  double current = rho;
  std::size_t last = 0;
  while (current < margin) {
    std::size_t pick = 0;
    for (std::size_t p = 1; p < model.size(); ++p)
      if (!touched[p] && contribution[p] < 0.0 &&
          (pick == 0 || contribution[p] < contribution[pick]))
        pick = p;
    if (pick == 0)
      break;
    touched[pick] = true;
    last = pick;
    const double deficit = margin - current;
    if (-contribution[pick] >= deficit) {
      const double scale = 1.0 - deficit / (-contribution[pick]);
      out.set_coefficient(pick, model.coefficient(pick) * scale);
      break;
    }
    out.set_coefficient(pick, 0.0);
    current -= contribution[pick];
  }
  for (int guard = 0; guard < 64 && last != 0 && evaluate(out, witness) < margin; ++guard) {
    const double a = out.coefficient(last);
    out.set_coefficient(last, std::nextafter(a, 0.0));
  }
  return out;
}

namespace {

std::vector<unsigned>
first_primes(std::size_t count)
{
  std::vector<unsigned> primes;
  for (unsigned n = 2; primes.size() < count; ++n) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > n)
        break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime)
      primes.push_back(n);
  }
  return primes;
}

double
radical_inverse(std::size_t index, unsigned base)
{
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

} // namespace

std::optional<Witness>
find_negative_witness(const Model& model, std::size_t budget)
{
  if (budget == 0)
    throw DomainError("find_negative_witness: budget must be at least 1");
  const std::size_t d = model.dimension();
  const BasisSpec& spec = model.spec();
  std::optional<Witness> best;
  std::size_t used = 0;

  auto consider = [&](Point x) {
    for (std::size_t i = 0; i < d; ++i)
      x[i] = spec.family(i).snap(*x[i]);
    const double rho = evaluate(model, x);
    ++used;
    if (rho < 0.0 && (!best || rho < best->density))
      best = Witness{ std::move(x), rho };
  };

  // corners, coordinate i taken from bit i of the counter
  const std::size_t corner_count =
    d >= 63 ? budget : std::min<std::size_t>(budget, std::size_t{ 1 } << d);
  for (std::size_t c = 0; c < corner_count && used < budget; ++c) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i)
      x[i] = (i < 63 && ((c >> i) & 1U)) ? 1.0 : 0.0;
    consider(std::move(x));
  }

  // edge midpoints: one coordinate at 0.5, the others at a corner
  const std::size_t other_corners = d >= 64 ? budget : (std::size_t{ 1 } << (d - 1));
  for (std::size_t i = 0; i < d && used < budget; ++i)
    for (std::size_t c = 0; c < other_corners && used < budget; ++c) {
      Point x(d);
      std::size_t bit = 0;
      for (std::size_t k = 0; k < d; ++k) {
        if (k == i) {
          x[k] = 0.5;
          continue;
        }
        x[k] = (bit < 63 && ((c >> bit) & 1U)) ? 1.0 : 0.0;
        ++bit;
      }
      consider(std::move(x));
    }

  const std::vector<unsigned> primes = first_primes(d);
  for (std::size_t n = 1; used < budget; ++n) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i)
      x[i] = radical_inverse(n, primes[i]);
    consider(std::move(x));
  }
  return best;
}

} // namespace hcr
