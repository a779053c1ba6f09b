#pragma once

#include "hcr/dataset.hpp"
#include "hcr/tensor_basis.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace hcr {

enum CoefficientFlag : std::uint8_t
{
  flag_none = 0,
  flag_no_evidence = 1,           ///< |K_C| = 0, coefficient set to 0
  flag_uncertainty_undefined = 2, ///< |K_C| = 1
};

/// Fitted density sum_f a_f f over a BasisSpec, with per-function evidence
/// and standard errors, and the coordinate transforms of the source data.
/// The constant coefficient is always exactly 1.
class Model
{
public:
  Model() = default;
  /// Uniform density: every non-constant coefficient 0, flagged no-evidence.
  explicit Model(BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  std::size_t dimension() const { return spec_.dimension(); }
  std::size_t size() const { return coefficients_.size(); }

  std::span<const double> coefficients() const { return coefficients_; }
  double coefficient(std::size_t pos) const { return coefficients_[pos]; }
  /// Throws DomainError when asked to change the constant away from 1.
  void set_coefficient(std::size_t pos, double value);

  double uncertainty(std::size_t pos) const { return uncertainty_[pos]; }
  void set_uncertainty(std::size_t pos, double value) { uncertainty_[pos] = value; }
  std::uint8_t flags(std::size_t pos) const { return flags_[pos]; }
  void set_flags(std::size_t pos, std::uint8_t f) { flags_[pos] = f; }

  /// |K_C| for C = {} and every support with nonempty B_C.
  const std::map<Subset, std::size_t>& evidence() const { return evidence_; }
  std::size_t evidence(const Subset& c) const;
  void set_evidence(const Subset& c, std::size_t count) { evidence_[c] = count; }

  const std::vector<Transform>& transforms() const { return transforms_; }
  void set_transforms(std::vector<Transform> transforms);
  const std::vector<std::string>& names() const { return names_; }
  void set_names(std::vector<std::string> names);

  /// Same coefficients on a sub-basis of this model's basis.
  Model restricted(BasisSpec sub) const;

private:
  BasisSpec spec_;
  std::vector<double> coefficients_;
  std::vector<double> uncertainty_;
  std::vector<std::uint8_t> flags_;
  std::map<Subset, std::size_t> evidence_;
  std::vector<Transform> transforms_;
  std::vector<std::string> names_;
};

/// a_f = mean of f over K_C = {k : C subset of C_k}; uncertainty is the
/// (n-1) sample standard deviation over K_C divided by sqrt|K_C|.
Model
fit(const BasisSpec& spec, const Dataset& data);

/// a_f <- (1 - lambda) a_f + lambda f(x) for every f whose support is known
/// in `record`; evidence counters of those supports are incremented.
void
adapt_in_place(Model& model, const Record& record, double lambda);

Model
adapt(Model model, const Record& record, double lambda);

/// Geometric learning-rate decay from `start` to `end` over `horizon` steps.
class LearningRateSchedule
{
public:
  LearningRateSchedule(std::size_t horizon, double start = 0.05, double end = 0.001);
  double operator()(std::size_t step) const;

private:
  std::size_t horizon_;
  double start_;
  double end_;
};

/// Online adaptation with a single writer. Readers take immutable snapshots
/// and never observe a partially updated model.
class OnlineEstimator
{
public:
  explicit OnlineEstimator(Model initial);

  std::shared_ptr<const Model> snapshot() const;
  void update(const Record& record, double lambda);

private:
  mutable std::mutex mutex_;
  std::shared_ptr<const Model> current_;
};

struct PruneResult
{
  Model model;
  std::vector<MultiIndex> removed;
};

/// Drops every f with |a_f| < threshold_sigmas * uncertainty(f). The
/// constant is never removed.
PruneResult
prune(const Model& model, double threshold_sigmas);

} // namespace hcr
