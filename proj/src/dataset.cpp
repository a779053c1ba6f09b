#include "hcr/dataset.hpp"

#include "hcr/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hcr {

Subset
known_set(const Record& record)
{
  Subset s;
  for (std::size_t i = 0; i < record.size(); ++i)
    if (record[i])
      s.push_back(i);
  return s;
}

namespace {

std::string
trim(std::string_view s)
{
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string>
split(const std::string& line, char delimiter)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    out.push_back(trim(std::string_view(line).substr(
      start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos)
      break;
    start = pos + 1;
  }
  return out;
}

std::optional<double>
parse_number(const std::string& text)
{
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::vector<double>
parse_number_list(const std::string& text, const std::string& context)
{
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    auto v = parse_number(item);
    if (!v)
      throw DataError(context + ": '" + item + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

} // namespace

std::vector<std::size_t>
Table::presence_counts() const
{
  std::vector<std::size_t> counts(columns(), 0);
  for (const Record& r : values)
    for (std::size_t i = 0; i < r.size(); ++i)
      counts[i] += r[i].has_value();
  return counts;
}

std::optional<std::size_t>
Table::column(const std::string& name) const
{
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

Table
load_table(std::istream& in, const TableOptions& options)
{
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    std::vector<std::string> cells = split(line, options.delimiter);
    if (!have_header) {
      table.names = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.names.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.names.size()) + " cells, found " +
                      std::to_string(cells.size()));
    Record record(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const bool missing =
        std::find(options.missing_tokens.begin(), options.missing_tokens.end(),
                  cells[i]) != options.missing_tokens.end();
      if (missing)
        continue;
      auto v = parse_number(cells[i]);
      if (!v)
        throw DataError("line " + std::to_string(line_no) + ", column '" +
                        table.names[i] + "': non-numeric value '" + cells[i] +
                        "'");
      record[i] = *v;
    }
    table.cells.push_back(std::move(cells));
    table.values.push_back(std::move(record));
  }
  if (!have_header)
    throw DataError("empty table: no header row");
  if (table.values.empty())
    throw DataError("empty table: no data rows");
  return table;
}

Table
load_table_file(const std::string& path, const TableOptions& options)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open table '" + path + "'");
  return load_table(in, options);
}

void
write_row(std::ostream& out,
          const std::vector<std::string>& cells,
          char delimiter)
{
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i)
      out << delimiter;
    out << cells[i];
  }
  out << '\n';
}

std::string
format_double(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// ---------------------------------------------------------------------------

Transform
Transform::rescale(double min, double max, bool strict)
{
  if (!(max > min) || !std::isfinite(min) || !std::isfinite(max))
    throw DomainError("rescale transform needs finite min < max");
  Transform t;
  t.kind_ = Kind::rescale;
  t.min_ = min;
  t.max_ = max;
  t.strict_ = strict;
  return t;
}

Transform
Transform::logistic()
{
  Transform t;
  t.kind_ = Kind::logistic;
  return t;
}

Transform
Transform::empirical_cdf(std::vector<double> support,
                         std::vector<double> positions,
                         std::size_t sample_size)
{
  if (support.size() < 2 || support.size() != positions.size())
    throw DataError("empirical CDF table needs at least 2 matching points");
  for (std::size_t k = 1; k < support.size(); ++k)
    if (!(support[k] > support[k - 1]) || !(positions[k] > positions[k - 1]))
      throw DataError("empirical CDF table must be strictly increasing");
  Transform t;
  t.kind_ = Kind::empirical_cdf;
  t.xs_ = std::move(support);
  t.ps_ = std::move(positions);
  t.sample_size_ = sample_size;
  return t;
}

Transform
Transform::categorical(std::vector<double> categories)
{
  if (categories.size() < 2)
    throw DataError("categorical transform needs at least 2 categories");
  for (std::size_t i = 0; i < categories.size(); ++i)
    for (std::size_t k = i + 1; k < categories.size(); ++k)
      if (categories[i] == categories[k])
        throw DataError("categorical transform: duplicate category");
  Transform t;
  t.kind_ = Kind::categorical;
  t.xs_ = std::move(categories);
  return t;
}

double
Transform::apply(double value) const
{
  switch (kind_) {
    case Kind::rescale: {
      if (strict_ && (value < min_ || value > max_))
        throw DomainError("value " + format_double(value) + " outside [" +
                          format_double(min_) + ", " + format_double(max_) +
                          "]");
      return std::clamp((value - min_) / (max_ - min_), 0.0, 1.0);
    }
    case Kind::logistic:
      return 1.0 / (1.0 + std::exp(-value));
    case Kind::empirical_cdf: {
      if (value <= xs_.front())
        return ps_.front();
      if (value >= xs_.back())
        return ps_.back();
      const auto hi = std::upper_bound(xs_.begin(), xs_.end(), value) - xs_.begin();
      const auto lo = hi - 1;
      const double t = (value - xs_[lo]) / (xs_[hi] - xs_[lo]);
      return ps_[lo] + t * (ps_[hi] - ps_[lo]);
    }
    case Kind::categorical: {
      for (std::size_t k = 0; k < xs_.size(); ++k)
        if (std::abs(value - xs_[k]) <= 1e-9 * std::max(1.0, std::abs(xs_[k])))
          return static_cast<double>(k) / (xs_.size() - 1);
      throw DomainError("value " + format_double(value) +
                        " is not a declared category");
    }
  }
  return NAN;
}

double
Transform::invert(double u) const
{
  if (!(u >= 0.0 && u <= 1.0))
    throw DomainError("invert: value " + format_double(u) + " outside [0,1]");
  switch (kind_) {
    case Kind::rescale:
      return min_ + u * (max_ - min_);
    case Kind::logistic:
      return std::log(u / (1.0 - u));
    case Kind::empirical_cdf: {
      if (u <= ps_.front())
        return xs_.front();
      if (u >= ps_.back())
        return xs_.back();
      const auto hi = std::upper_bound(ps_.begin(), ps_.end(), u) - ps_.begin();
      const auto lo = hi - 1;
      const double t = (u - ps_[lo]) / (ps_[hi] - ps_[lo]);
      return xs_[lo] + t * (xs_[hi] - xs_[lo]);
    }
    case Kind::categorical: {
      const auto k = static_cast<std::size_t>(std::lround(u * (xs_.size() - 1)));
      return xs_[k];
    }
  }
  return NAN;
}

Transform
fit_empirical_cdf(std::span<const double> values)
{
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t l = sorted.size();
  std::vector<double> xs, ps;
  for (std::size_t a = 0; a < l;) {
    std::size_t b = a;
    while (b + 1 < l && sorted[b + 1] == sorted[a])
      ++b;
    // ranks a+1..b+1, positions (k - 0.5)/l averaged
    const double mean_rank = 0.5 * static_cast<double>(a + b) + 1.0;
    xs.push_back(sorted[a]);
    ps.push_back((mean_rank - 0.5) / static_cast<double>(l));
    a = b + 1;
  }
  if (xs.size() < 2)
    throw DataError("empirical CDF needs at least 2 distinct values (constant "
                    "coordinate)");
  return Transform::empirical_cdf(std::move(xs), std::move(ps), l);
}

Transform
fit_rescale(std::span<const double> values)
{
  if (values.empty())
    throw DataError("rescale: no values to fit");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*hi > *lo))
    throw DataError("rescale: constant coordinate");
  return Transform::rescale(*lo, *hi);
}

// ---------------------------------------------------------------------------

Schema
Schema::parse(std::istream& in)
{
  Schema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw DataError("schema line " + std::to_string(line_no) +
                      ": expected 'name: kind [key=value ...]'");
    CoordinateSchema c;
    c.name = trim(std::string_view(t).substr(0, colon));
    if (c.name.empty())
      throw DataError("schema line " + std::to_string(line_no) + ": empty name");
    std::istringstream rest(t.substr(colon + 1));
    std::string word;
    bool have_kind = false;
    bool have_transform = false;
    const std::string where = "schema line " + std::to_string(line_no);
    while (rest >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos) {
        if (have_kind)
          throw DataError(where + ": unexpected '" + word + "'");
        if (word == "continuous")
          c.kind = CoordinateKind::continuous;
        else if (word == "discrete")
          c.kind = CoordinateKind::discrete;
        else
          throw DataError(where + ": unknown kind '" + word + "'");
        have_kind = true;
        continue;
      }
      const std::string key = word.substr(0, eq);
      const std::string value = word.substr(eq + 1);
      if (key == "transform") {
        if (value != "unit" && value != "rescale" && value != "logistic" &&
            value != "ecdf" && value != "categorical")
          throw DataError(where + ": unknown transform '" + value + "'");
        c.transform = value;
        have_transform = true;
      } else if (key == "min" || key == "max") {
        auto v = parse_number(value);
        if (!v)
          throw DataError(where + ": " + key + " is not a number");
        (key == "min" ? c.min : c.max) = *v;
      } else if (key == "categories") {
        c.categories = parse_number_list(value, where);
      } else if (key == "family") {
        if (value != "legendre" && value != "trig")
          throw DataError(where + ": unknown family '" + value + "'");
        c.family = value;
      } else {
        throw DataError(where + ": unknown key '" + key + "'");
      }
    }
    if (c.kind == CoordinateKind::discrete) {
      if (have_transform && c.transform != "categorical")
        throw DataError(where + ": discrete coordinates use the categorical transform");
      c.transform = "categorical";
    } else if (c.transform == "categorical") {
      throw DataError(where + ": categorical transform needs a discrete coordinate");
    }
    if (schema.find(c.name))
      throw DataError(where + ": duplicate coordinate '" + c.name + "'");
    schema.coordinates.push_back(std::move(c));
  }
  return schema;
}

Schema
Schema::parse_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open schema '" + path + "'");
  return parse(in);
}

Schema
Schema::defaults(const std::vector<std::string>& names)
{
  Schema schema;
  for (const std::string& n : names) {
    CoordinateSchema c;
    c.name = n;
    schema.coordinates.push_back(std::move(c));
  }
  return schema;
}

const CoordinateSchema*
Schema::find(const std::string& name) const
{
  for (const CoordinateSchema& c : coordinates)
    if (c.name == name)
      return &c;
  return nullptr;
}

std::vector<CoordinateSchema>
Schema::align(const std::vector<std::string>& names) const
{
  for (const CoordinateSchema& c : coordinates)
    if (std::find(names.begin(), names.end(), c.name) == names.end())
      throw DataError("schema names coordinate '" + c.name +
                      "' which is not a table column");
  std::vector<CoordinateSchema> out;
  for (const std::string& n : names) {
    if (const CoordinateSchema* c = find(n)) {
      out.push_back(*c);
    } else {
      CoordinateSchema d;
      d.name = n;
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<Transform>
fit_transforms(const std::vector<CoordinateSchema>& schema, const Table& table)
{
  if (schema.size() != table.columns())
    throw DataError("schema has " + std::to_string(schema.size()) +
                    " coordinates but the table has " +
                    std::to_string(table.columns()) + " columns");
  std::vector<Transform> out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const CoordinateSchema& c = schema[i];
    std::vector<double> present;
    for (const Record& r : table.values)
      if (r[i])
        present.push_back(*r[i]);
    try {
      if (c.transform == "unit") {
        out.push_back(Transform::unit());
      } else if (c.transform == "logistic") {
        out.push_back(Transform::logistic());
      } else if (c.transform == "rescale") {
        if (c.min && c.max) {
          out.push_back(Transform::rescale(*c.min, *c.max, true));
        } else {
          Transform fitted = fit_rescale(present);
          out.push_back(Transform::rescale(c.min.value_or(fitted.min()),
                                           c.max.value_or(fitted.max()),
                                           false));
        }
      } else if (c.transform == "ecdf") {
        out.push_back(fit_empirical_cdf(present));
      } else if (c.transform == "categorical") {
        std::vector<double> cats = c.categories;
        if (cats.empty()) {
          cats = present;
          std::sort(cats.begin(), cats.end());
          cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
        }
        out.push_back(Transform::categorical(std::move(cats)));
      } else {
        throw DataError("unknown transform '" + c.transform + "'");
      }
    } catch (const Error& e) {
      throw DataError("coordinate '" + c.name + "': " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::size_t dimension)
  : dimension_(dimension)
{}

Dataset::Dataset(std::size_t dimension, std::vector<Record> records)
  : dimension_(dimension)
{
  records_.reserve(records.size());
  for (Record& r : records)
    add(std::move(r));
}

void
Dataset::add(Record record)
{
  if (record.size() != dimension_)
    throw DomainError("record has " + std::to_string(record.size()) +
                      " coordinates, dataset dimension is " +
                      std::to_string(dimension_));
  for (const auto& v : record)
    if (v && !(*v >= 0.0 && *v <= 1.0))
      throw DomainError("record value " + format_double(*v) +
                        " outside [0,1]; transform it first");
  records_.push_back(std::move(record));
}

std::size_t
Dataset::evidence(const Subset& c) const
{
  std::size_t n = 0;
  for (const Record& r : records_) {
    bool ok = true;
    for (std::size_t i : c)
      if (!r[i]) {
        ok = false;
        break;
      }
    n += ok;
  }
  return n;
}

bool
Dataset::complete(std::size_t k) const
{
  const Record& r = records_[k];
  return std::all_of(r.begin(), r.end(), [](const auto& v) { return v.has_value(); });
}

Dataset
apply_transforms(const Table& table, const std::vector<Transform>& transforms)
{
  if (transforms.size() != table.columns())
    throw DataError("transform count does not match table columns");
  Dataset data(table.columns());
  for (std::size_t k = 0; k < table.rows(); ++k) {
    Record r(table.columns());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!table.values[k][i])
        continue;
      try {
        r[i] = transforms[i].apply(*table.values[k][i]);
      } catch (const DomainError& e) {
        throw DataError("row " + std::to_string(k + 1) + ", column '" +
                        table.names[i] + "': " + e.what());
      }
    }
    data.add(std::move(r));
  }
  return data;
}

} // namespace hcr
