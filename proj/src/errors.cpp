#include "hcr/errors.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace hcr {

namespace {

std::string
describe_records(const std::vector<std::size_t>& records,
                 const std::vector<double>& densities)
{
  std::ostringstream os;
  os << "nonpositive density at " << records.size() << " record(s):";
  const std::size_t shown = std::min<std::size_t>(records.size(), 10);
  for (std::size_t i = 0; i < shown; ++i)
    os << " #" << records[i] << "=" << densities[i];
  if (shown < records.size())
    os << " ...";
  return os.str();
}

} // namespace

NonpositiveMassError::NonpositiveMassError(double denominator)
  : NumericError("nonpositive conditional mass (denominator = " +
                 std::to_string(denominator) + ")")
  , denominator_(denominator)
{}

NonpositiveDensityError::NonpositiveDensityError(
  std::vector<std::size_t> records,
  std::vector<double> densities)
  : NumericError(describe_records(records, densities))
  , records_(std::move(records))
  , densities_(std::move(densities))
{}

} // namespace hcr
