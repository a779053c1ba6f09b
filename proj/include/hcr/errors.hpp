#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcr {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! A value lies outside the admissible domain (order, [0,1] range, grid).
class DomainError : public Error
{
public:
  using Error::Error;
};

//! A coordinate needed by a basis function is absent from the point.
class MissingCoordinateError : public Error
{
public:
  MissingCoordinateError(std::size_t coordinate, const std::string& what)
    : Error(what)
    , coordinate_(coordinate)
  {}
  std::size_t coordinate() const { return coordinate_; }

private:
  std::size_t coordinate_;
};

//! Malformed or inconsistent input data (tables, schemas, model files).
class DataError : public Error
{
public:
  using Error::Error;
};

//! Base for numerical failures: nonpositive mass, positivity exhaustion.
class NumericError : public Error
{
public:
  using Error::Error;
};

//! The denominator of a conditional slice is not positive.
class NonpositiveMassError : public NumericError
{
public:
  explicit NonpositiveMassError(double denominator);
  double denominator() const { return denominator_; }

private:
  double denominator_;
};

//! The density is not positive at one or more data records.
class NonpositiveDensityError : public NumericError
{
public:
  NonpositiveDensityError(std::vector<std::size_t> records,
                          std::vector<double> densities);
  const std::vector<std::size_t>& records() const { return records_; }
  const std::vector<double>& densities() const { return densities_; }

private:
  std::vector<std::size_t> records_;
  std::vector<double> densities_;
};

} // namespace hcr
