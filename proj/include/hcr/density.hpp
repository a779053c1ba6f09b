#pragma once

#include "hcr/estimator.hpp"

#include <cstddef>
#include <vector>

namespace hcr {

/// sum_f a_f f(x) at a complete point; may be negative.
double
evaluate(const Model& model, PointView x);

/// Density of the model marginalized onto the known coordinates of `x`,
/// evaluated there (functions whose support is not known are dropped).
double
evaluate_marginal(const Model& model, PointView x);

/// Integral of the model over [0,1]^d. Only the constant survives
/// integration, so this is the constant coefficient (always 1).
double
total_mass(const Model& model);

/// max(value, epsilon); epsilon must be positive.
double
clamp(double value, double epsilon);

/// One-coordinate section of the density with the known coordinates fixed:
///   rho(x_i) = sum_j numerator[j] f_j(x_i) / denominator
/// numerator[0] is the denominator itself, so the slice integrates to 1.
class ConditionalSlice
{
public:
  ConditionalSlice(std::size_t free_coordinate,
                   Family1D family,
                   std::vector<double> numerator,
                   double denominator);

  std::size_t free_coordinate() const { return free_; }
  const Family1D& family() const { return family_; }
  const std::vector<double>& numerator() const { return numerator_; }
  double denominator() const { return denominator_; }

  /// Normalized density at x (a grid point for discrete families).
  double operator()(double x) const;
  double derivative(double x) const;
  /// Exact integral over [0,1] (under the grid weight for discrete families).
  double integral() const { return numerator_[0] / denominator_; }

private:
  std::size_t free_;
  Family1D family_;
  std::vector<double> numerator_;
  double denominator_;
};

/// Slice of coordinate `free` given the present coordinates of `known`.
/// Throws NonpositiveMassError when the conditional mass is not positive.
ConditionalSlice
conditional_slice(const Model& model, PointView known, std::size_t free);

struct SliceMoments
{
  double mean = 0.0;
  double variance = 0.0;
  /// the slice dips below zero somewhere; mean was clipped into [0,1]
  bool negative_region = false;
};

SliceMoments
expected_value(const ConditionalSlice& slice);

/// Minimum of the slice over [0,1] (over the grid for discrete families).
double
slice_minimum(const ConditionalSlice& slice);

struct Cluster
{
  double lo = 0.0;
  double hi = 1.0;
  double mean = 0.5;
  double mass = 1.0;
};

/// Splits [0,1] at interior local minima of the slice. Clusters with mass
/// below `min_mass` are merged into the adjacent cluster with the nearer
/// mean. Sorted by mass descending, ties by left endpoint.
std::vector<Cluster>
modes_and_clusters(const ConditionalSlice& slice, double min_mass = 0.01);

struct Mode
{
  double location = 0.5;
  double density = 1.0;
  /// another maximum has the same height; the smaller location was chosen
  bool tie = false;
};

/// Global maximum of the slice over [0,1].
Mode
top_mode(const ConditionalSlice& slice);

enum class ImputePolicy
{
  expected,
  top_mode,
  cluster_split
};

struct Completion
{
  Record values;
  double weight = 1.0;
  /// slice variance of every imputed coordinate (NaN for known ones)
  std::vector<double> variance;
  bool negative_region = false;
  bool tie = false;
};

/// Fills the missing coordinates one at a time, always taking next the
/// coordinate whose slice has the smallest variance and conditioning on the
/// values filled so far. cluster_split branches on multimodal slices; the
/// returned weights sum to 1. Discrete coordinates are snapped to their grid.
std::vector<Completion>
impute(const Model& model, const Record& record, ImputePolicy policy);

/// Model over the coordinates in `keep`: exactly the functions whose support
/// lies inside `keep`, coefficients unchanged.
Model
marginalize(const Model& model, const Subset& keep);

} // namespace hcr
