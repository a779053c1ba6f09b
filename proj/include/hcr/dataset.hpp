#pragma once

#include "hcr/tensor_basis.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hcr {

/// One data point; a missing coordinate is std::nullopt.
using Record = Point;

/// Known coordinates C_k of a record.
Subset
known_set(const Record& record);

// ---------------------------------------------------------------------------
// Raw tables (original units)

struct TableOptions
{
  char delimiter = ',';
  std::vector<std::string> missing_tokens{ "", "NA", "nan", "?" };
};

/// Character-separated table with a header row. Cells are kept verbatim so
/// that output can reproduce untouched cells exactly.
struct Table
{
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> cells;
  std::vector<Record> values;

  std::size_t columns() const { return names.size(); }
  std::size_t rows() const { return values.size(); }
  std::vector<std::size_t> presence_counts() const;
  std::optional<std::size_t> column(const std::string& name) const;
};

/// Throws DataError on empty input, ragged rows or non-numeric cells.
Table
load_table(std::istream& in, const TableOptions& options = {});
Table
load_table_file(const std::string& path, const TableOptions& options = {});

void
write_row(std::ostream& out,
          const std::vector<std::string>& cells,
          char delimiter);

/// Shortest decimal text that reads back to the same double ("%.17g").
std::string
format_double(double value);

// ---------------------------------------------------------------------------
// Coordinate transforms to [0,1]

class Transform
{
public:
  enum class Kind
  {
    rescale,
    logistic,
    empirical_cdf,
    categorical
  };

  /// Affine map [min,max] -> [0,1]. Non-strict transforms clamp outside
  /// values; strict ones reject them.
  static Transform rescale(double min, double max, bool strict = false);
  /// Strict identity on [0,1].
  static Transform unit() { return rescale(0.0, 1.0, true); }
  /// s(y) = 1/(1+e^{-y}), s^{-1}(x) = ln(x/(1-x)).
  static Transform logistic();
  /// Piecewise-linear CDF through (support[k], positions[k]); `sample_size`
  /// is l, the count the positions were computed from.
  static Transform empirical_cdf(std::vector<double> support,
                                 std::vector<double> positions,
                                 std::size_t sample_size);
  /// Ordered categories mapped to k/(v-1).
  static Transform categorical(std::vector<double> categories);

  Kind kind() const { return kind_; }
  double apply(double value) const;
  double invert(double unit_value) const;

  double min() const { return min_; }
  double max() const { return max_; }
  bool strict() const { return strict_; }
  const std::vector<double>& support() const { return xs_; }
  const std::vector<double>& positions() const { return ps_; }
  std::size_t sample_size() const { return sample_size_; }
  const std::vector<double>& categories() const { return xs_; }

  bool operator==(const Transform&) const = default;

private:
  Transform() = default;

  Kind kind_ = Kind::rescale;
  double min_ = 0.0;
  double max_ = 1.0;
  bool strict_ = true;
  std::vector<double> xs_;
  std::vector<double> ps_;
  std::size_t sample_size_ = 0;
};

/// Empirical CDF with plotting positions (k - 0.5)/l; tied values share the
/// mean of their positions; outside the sample range the value is clamped to
/// [1/(2l), 1 - 1/(2l)]. Throws DataError for fewer than 2 distinct values.
Transform
fit_empirical_cdf(std::span<const double> values);

/// Rescale over the observed [min, max]; throws DataError if constant.
Transform
fit_rescale(std::span<const double> values);

// ---------------------------------------------------------------------------
// Schema side channel

enum class CoordinateKind
{
  continuous,
  discrete
};

struct CoordinateSchema
{
  std::string name;
  CoordinateKind kind = CoordinateKind::continuous;
  /// "unit", "rescale", "logistic", "ecdf" or "categorical"
  std::string transform = "unit";
  std::optional<double> min;
  std::optional<double> max;
  std::vector<double> categories;
  /// "legendre" or "trig"; ignored for discrete coordinates
  std::string family = "legendre";
};

/// Plain-text schema, one coordinate per line:
///   name: continuous transform=ecdf
///   age: continuous transform=rescale min=0 max=120
///   grade: discrete categories=1,2,3
///   angle: continuous family=trig
/// Blank lines and lines starting with '#' are ignored.
struct Schema
{
  std::vector<CoordinateSchema> coordinates;

  static Schema parse(std::istream& in);
  static Schema parse_file(const std::string& path);
  /// Every column continuous with the strict unit transform.
  static Schema defaults(const std::vector<std::string>& names);

  const CoordinateSchema* find(const std::string& name) const;
  /// Entries aligned with the table's columns; columns absent from the schema
  /// get defaults. Throws DataError if the schema names an unknown column.
  std::vector<CoordinateSchema> align(const std::vector<std::string>& names) const;
};

/// Fits one transform per column according to the aligned schema.
std::vector<Transform>
fit_transforms(const std::vector<CoordinateSchema>& schema, const Table& table);

// ---------------------------------------------------------------------------
// Datasets in [0,1]^d

class Dataset
{
public:
  Dataset() = default;
  explicit Dataset(std::size_t dimension);
  /// Throws DomainError if a present value lies outside [0,1].
  Dataset(std::size_t dimension, std::vector<Record> records);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  void add(Record record);
  const Record& operator[](std::size_t k) const { return records_[k]; }
  const std::vector<Record>& records() const { return records_; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  Subset known(std::size_t k) const { return known_set(records_[k]); }
  /// |K_C|: records whose known set contains C.
  std::size_t evidence(const Subset& c) const;
  bool complete(std::size_t k) const;

private:
  std::size_t dimension_ = 0;
  std::vector<Record> records_;
};

/// Maps each present cell through its column's transform.
Dataset
apply_transforms(const Table& table, const std::vector<Transform>& transforms);

} // namespace hcr
