#pragma once

#include "hcr/dataset.hpp"
#include "hcr/estimator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hcr {

/// (1/n') sum ln rho(x^k) over the n' complete records. Throws
/// NonpositiveDensityError listing offending records, DataError if no record
/// is complete.
double
log_likelihood(const Model& model, const Dataset& data);

struct Gradient
{
  std::vector<double> values;       ///< aligned with model.spec().selected()
  std::vector<std::uint8_t> flags;  ///< flag_no_evidence where K_C is empty
};

/// Approximate dF/da_f = (1/|K_C|) sum_{k in K_C} f(x^k) / rho_k, where rho_k
/// is the model marginalized onto the known coordinates of record k. Exact on
/// complete data. The constant entry is always 0.
Gradient
gradient(const Model& model, const Dataset& data);

struct RefineConfig
{
  std::size_t steps = 10;
  double step_size = 0.1;
  double ridge = 0.0;
  double positivity_margin = 1e-6;
  double backtrack_factor = 0.5;
};

struct RefineResult
{
  Model model;
  /// penalized objective F(a) - ridge * sum a_f^2, initial value first
  std::vector<double> objective;
  /// F(a) alone, same indexing
  std::vector<double> log_likelihood;
  std::size_t steps_taken = 0;
  /// stopped before `steps` because no ascent step could be found
  bool converged = false;
};

/// Gradient ascent on F(a) - ridge * sum_{f != 0} a_f^2 with the constant held
/// at 1. Every step is shrunk by backtrack_factor until the density at all
/// records stays >= positivity_margin and the objective does not decrease.
/// Throws NumericError when 60 reductions cannot restore positivity.
RefineResult
refine(const Model& model, const Dataset& data, const RefineConfig& config);

enum class RepairStrategy
{
  rescale_all,
  reduce_largest
};

/// Raises the density at `witness` to exactly `margin` (up to rounding, never
/// below). rescale_all multiplies every non-constant coefficient by one
/// factor in (0,1); reduce_largest shrinks the most negative contributions
/// at the witness one at a time. Throws DomainError if the witness density is
/// already >= margin.
Model
repair_negative(const Model& model,
                PointView witness,
                RepairStrategy strategy,
                double margin = 1e-6);

struct Witness
{
  Point point;
  double density;
};

/// Scans corners, then edge midpoints, then a Halton sequence, evaluating at
/// most `budget` points. Returns the most negative point found.
std::optional<Witness>
find_negative_witness(const Model& model, std::size_t budget);

} // namespace hcr
