#include "hcr/commands.hpp"

#include "hcr/density.hpp"
#include "hcr/errors.hpp"
#include "hcr/estimator.hpp"
#include "hcr/likelihood.hpp"
#include "hcr/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace hcr::cli {

namespace {

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

int
guarded(std::ostream& err, const std::function<int()>& body)
{
  try {
    return body();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const NonpositiveDensityError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return exit_numeric;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return exit_numeric;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return exit_data;
  }
}

std::vector<std::string>
split_list(const std::string& text, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    out.push_back(item);
  if (!text.empty() && text.back() == sep)
    out.emplace_back();
  return out;
}

TableOptions
table_options(const TableFlags& flags)
{
  TableOptions o;
  o.delimiter = flags.delimiter;
  if (flags.missing_tokens) {
    o.missing_tokens = split_list(*flags.missing_tokens, ',');
    o.missing_tokens.emplace_back();
  }
  return o;
}

// Writes to `fallback` when path is "-", otherwise to the file.
class Sink
{
public:
  Sink(const std::string& path, std::ostream& fallback)
  {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_)
        throw DataError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string
fmt(const char* spec, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<int>
parse_orders(const std::string& text, std::size_t d)
{
  std::vector<int> levels{ 0 };
  for (const std::string& item : split_list(text, ',')) {
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(item, &used);
      if (used != item.size() || v < 0)
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--orders expects non-negative integers, got '" + item + "'");
    }
    levels.push_back(v);
  }
  if (levels.size() > d + 1)
    throw UsageError("--orders lists " + std::to_string(levels.size() - 1) +
                     " levels but the data has only " + std::to_string(d) +
                     " coordinates");
  levels.resize(d + 1, 0);
  return levels;
}

void
check_columns(const Table& table, const Model& model)
{
  if (table.columns() != model.dimension())
    throw DataError("table has " + std::to_string(table.columns()) +
                    " columns but the model has dimension " +
                    std::to_string(model.dimension()));
  for (std::size_t i = 0; i < table.columns(); ++i)
    if (table.names[i] != model.names()[i])
      throw DataError("column " + std::to_string(i + 1) + " is '" + table.names[i] +
                      "' but the model expects '" + model.names()[i] + "'");
}

std::string
subset_label(const Subset& c, const std::vector<std::string>& names)
{
  std::string s = "{";
  for (std::size_t k = 0; k < c.size(); ++k)
    s += (k ? "," : "") + names[c[k]];
  return s + "}";
}

const char*
order_label(int j)
{
  switch (j) {
    case 1:
      return "trend";
    case 2:
      return "focus/spread";
    case 3:
      return "skew-like";
    case 4:
      return "kurtosis-like";
    default:
      return nullptr;
  }
}

std::string
interpretation(const MultiIndex& j, double coefficient)
{
  const Subset s = j.support();
  if (s.empty())
    return "normalization";
  auto one = [&](std::size_t i) {
    const char* l = order_label(j[i]);
    return l ? std::string(l) : "order " + std::to_string(j[i]);
  };
  std::string coords;
  for (std::size_t k = 0; k < s.size(); ++k)
    coords += (k ? "," : "") + std::to_string(s[k] + 1);
  if (s.size() == 1)
    return "coordinate " + coords + ": " + one(s[0]);
  if (s.size() == 2 && j[s[0]] == 1 && j[s[1]] == 1)
    return "coordinates " + coords + ": " +
           (coefficient >= 0.0 ? "co-increase" : "counter-increase");
  std::string parts;
  for (std::size_t k = 0; k < s.size(); ++k)
    parts += (k ? " x " : "") + one(s[k]);
  return "coordinates " + coords + ": " + parts;
}

ImputePolicy
parse_policy(const std::string& p)
{
  if (p == "expected")
    return ImputePolicy::expected;
  if (p == "top-mode")
    return ImputePolicy::top_mode;
  if (p == "cluster-split")
    return ImputePolicy::cluster_split;
  throw UsageError("--policy must be expected, top-mode or cluster-split");
}

} // namespace

// ---------------------------------------------------------------------------

int
cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const Table table = load_table_file(o.input, table_options(o.table));
    const Schema schema = o.schema ? Schema::parse_file(*o.schema)
                                   : Schema::defaults(table.names);
    const std::vector<CoordinateSchema> aligned = schema.align(table.names);
    const std::size_t d = table.columns();
    const std::vector<int> levels = parse_orders(o.orders, d);
    const std::vector<Transform> transforms = fit_transforms(aligned, table);
    const Dataset data = apply_transforms(table, transforms);

    const int top = *std::max_element(levels.begin(), levels.end());
    std::vector<Family1D> families;
    for (std::size_t i = 0; i < d; ++i) {
      const CoordinateSchema& c = aligned[i];
      if (c.kind == CoordinateKind::discrete) {
        const int v = static_cast<int>(transforms[i].categories().size());
        families.push_back(Family1D::discrete(v, std::min(top, v - 1)));
      } else if (c.family == "trig") {
        families.push_back(Family1D::trig(top));
      } else {
        families.push_back(Family1D::legendre(top));
      }
    }
    const BasisSpec spec = build_full(families, levels, OrderCap::clamp_to_family);
    Model model = fit(spec, data);
    model.set_names(table.names);
    model.set_transforms(transforms);

    {
      Sink sink(o.out, out);
      save_model(*sink, model);
    }

    std::ostream& report = o.out == "-" ? err : out;
    report << "fit: " << data.size() << " records, " << d << " coordinates, "
           << model.size() - 1 << " free coefficients\n";
    std::vector<std::size_t> per_level(d + 1, 0);
    for (const MultiIndex& j : spec.selected())
      ++per_level[j.level()];
    for (std::size_t l = 1; l <= d; ++l)
      if (per_level[l])
        report << "  level " << l << ": " << per_level[l] << " coefficients\n";

    report << "evidence |K_C|:\n";
    std::size_t shown = 0;
    for (const auto& [c, n] : model.evidence()) {
      if (c.empty())
        continue;
      if (++shown > 20) {
        report << "  ... (" << model.evidence().size() - 21 << " more)\n";
        break;
      }
      report << "  " << subset_label(c, model.names()) << ": " << n << '\n';
    }

    std::vector<std::size_t> order;
    for (std::size_t p = 1; p < model.size(); ++p)
      if (std::isfinite(model.uncertainty(p)) && model.uncertainty(p) > 0.0)
        order.push_back(p);
    auto significance = [&](std::size_t p) {
      return std::abs(model.coefficient(p)) / model.uncertainty(p);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return significance(a) > significance(b);
    });
    if (!order.empty())
      report << "top coefficients by |a|/sd:\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(order.size(), 10); ++k) {
      const std::size_t p = order[k];
      report << "  " << spec.selected()[p].to_string() << " a=" << fmt("%.6g", model.coefficient(p))
             << " sd=" << fmt("%.3g", model.uncertainty(p))
             << " |a|/sd=" << fmt("%.3g", significance(p)) << '\n';
    }

    if (model.size() == 1)
      err << "warning: uniform model (no basis functions beyond the constant)\n";
    for (std::size_t p = 1; p < model.size(); ++p)
      if (model.flags(p) & flag_no_evidence) {
        const Subset c = spec.selected()[p].support();
        err << "warning: no evidence for " << subset_label(c, model.names()) << " "
            << spec.selected()[p].to_string() << '\n';
      }
    return int(exit_ok);
  });
}

int
cmd_impute(const ImputeOptions& o, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const ImputePolicy policy = parse_policy(o.policy);
    const Model model = load_model_file(o.model);
    const Table table = load_table_file(o.input, table_options(o.table));
    check_columns(table, model);
    const std::size_t d = model.dimension();

    struct OutRow
    {
      std::vector<std::string> cells;
      double weight = 1.0;
      std::vector<std::string> variance;
      std::string note;
    };
    std::vector<OutRow> rows;
    std::size_t failures = 0;

    for (std::size_t r = 0; r < table.rows(); ++r) {
      const Record& raw = table.values[r];
      const bool complete =
        std::all_of(raw.begin(), raw.end(), [](const auto& v) { return v.has_value(); });
      OutRow base{ table.cells[r], 1.0, std::vector<std::string>(d), {} };
      if (complete) {
        rows.push_back(std::move(base));
        continue;
      }
      Record record(d);
      for (std::size_t i = 0; i < d; ++i)
        if (raw[i]) {
          try {
            record[i] = model.transforms()[i].apply(*raw[i]);
          } catch (const DomainError& e) {
            throw DataError("row " + std::to_string(r + 1) + ", column '" +
                            table.names[i] + "': " + e.what());
          }
        }
      try {
        for (const Completion& c : impute(model, record, policy)) {
          OutRow row = base;
          row.weight = c.weight;
          for (std::size_t i = 0; i < d; ++i) {
            if (raw[i])
              continue;
            row.cells[i] = format_double(model.transforms()[i].invert(*c.values[i]));
            row.variance[i] = format_double(c.variance[i]);
          }
          if (c.negative_region)
            row.note = "negative density region in slice";
          if (c.tie)
            row.note += std::string(row.note.empty() ? "" : "; ") + "tied modes";
          rows.push_back(std::move(row));
        }
      } catch (const NonpositiveMassError& e) {
        ++failures;
        base.note = "unfilled: nonpositive conditional mass (denominator " +
                    format_double(e.denominator()) + ")";
        rows.push_back(std::move(base));
      }
    }

    const bool weights = policy == ImputePolicy::cluster_split;
    const bool notes =
      std::any_of(rows.begin(), rows.end(), [](const OutRow& r) { return !r.note.empty(); });

    Sink sink(o.out, out);
    std::vector<std::string> header = table.names;
    if (weights)
      header.push_back(kWeightColumn);
    if (o.report)
      for (const std::string& n : table.names)
        header.push_back(kVariancePrefix + n);
    if (notes)
      header.push_back(kNoteColumn);
    write_row(*sink, header, o.table.delimiter);
    for (OutRow& r : rows) {
      std::vector<std::string> cells = r.cells;
      if (weights)
        cells.push_back(format_double(r.weight));
      if (o.report)
        cells.insert(cells.end(), r.variance.begin(), r.variance.end());
      if (notes)
        cells.push_back(r.note);
      write_row(*sink, cells, o.table.delimiter);
    }
    if (failures)
      err << "warning: " << failures
          << " row(s) left unfilled (nonpositive conditional mass), see "
          << kNoteColumn << '\n';
    return int(exit_ok);
  });
}

int
cmd_density(const DensityOptions& o, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const Model model = load_model_file(o.model);
    const std::size_t d = model.dimension();
    if (o.grid < 2)
      throw UsageError("--grid must be at least 2");
    if (o.epsilon && !(*o.epsilon > 0.0))
      throw UsageError("--epsilon must be positive");

    const std::vector<std::string> tokens = split_list(o.point, ',');
    if (tokens.size() != d)
      throw UsageError("point '" + o.point + "' has " + std::to_string(tokens.size()) +
                       " coordinates, the model has " + std::to_string(d));
    Point point(d);
    std::optional<std::size_t> free;
    for (std::size_t i = 0; i < d; ++i) {
      std::string t = tokens[i];
      t.erase(0, t.find_first_not_of(" \t"));
      t.erase(t.find_last_not_of(" \t") + 1);
      if (t == "?") {
        if (free)
          throw UsageError("at most one '?' is allowed; use impute for joint queries");
        free = i;
        continue;
      }
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(t, &used);
        if (used != t.size())
          throw std::invalid_argument(t);
      } catch (const std::exception&) {
        throw UsageError("malformed coordinate '" + tokens[i] + "' in point");
      }
      point[i] = model.transforms()[i].apply(v);
    }
    auto shown = [&](double rho) { return o.epsilon ? clamp(rho, *o.epsilon) : rho; };

    if (!free) {
      out << format_double(shown(evaluate(model, point))) << '\n';
      return int(exit_ok);
    }
    const ConditionalSlice slice = conditional_slice(model, point, *free);
    std::vector<double> us;
    if (slice.family().is_continuous()) {
      for (int k = 0; k < o.grid; ++k)
        us.push_back(static_cast<double>(k) / (o.grid - 1));
    } else {
      us = slice.family().grid();
    }
    out << "u,value,density\n";
    for (double u : us)
      out << format_double(u) << ',' << format_double(model.transforms()[*free].invert(u))
          << ',' << format_double(shown(slice(u))) << '\n';
    return int(exit_ok);
  });
}

int
cmd_refine(const RefineOptions& o, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    Model model = load_model_file(o.model);
    const Table table = load_table_file(o.input, table_options(o.table));
    check_columns(table, model);
    const Dataset data = apply_transforms(table, model.transforms());

    if (o.repair) {
      // pull every complete record up to the margin before ascending
      for (std::size_t pass = 0; pass < data.size(); ++pass) {
        std::optional<std::size_t> worst;
        double worst_rho = o.margin;
        for (std::size_t k = 0; k < data.size(); ++k) {
          if (!data.complete(k))
            continue;
          const double rho = evaluate(model, data[k]);
          if (rho < worst_rho) {
            worst = k;
            worst_rho = rho;
          }
        }
        if (!worst)
          break;
        err << "repair: record " << *worst + 1 << " density " << format_double(worst_rho)
            << '\n';
        model = repair_negative(model, data[*worst], RepairStrategy::rescale_all, o.margin);
      }
    }

    RefineConfig config;
    config.steps = o.steps;
    config.step_size = o.rate;
    config.ridge = o.ridge;
    config.positivity_margin = o.margin;
    config.backtrack_factor = o.backtrack;
    RefineResult result;
    try {
      result = refine(model, data, config);
    } catch (const NonpositiveDensityError& e) {
      err << "witness records (1-based rows):";
      for (std::size_t k : e.records())
        err << ' ' << k + 1;
      err << '\n';
      throw;
    }

    {
      Sink sink(o.out, out);
      save_model(*sink, result.model);
    }
    auto write_trace = [&](std::ostream& s) {
      s << "step,objective,log_likelihood\n";
      for (std::size_t k = 0; k < result.objective.size(); ++k)
        s << k << ',' << format_double(result.objective[k]) << ','
          << format_double(result.log_likelihood[k]) << '\n';
    };
    if (o.trace) {
      Sink sink(*o.trace, out);
      write_trace(*sink);
    } else if (o.out != "-") {
      write_trace(out);
    }
    if (result.converged)
      err << "refine: stopped after " << result.steps_taken
          << " step(s), no further ascent found\n";
    return int(exit_ok);
  });
}

int
cmd_transform(const TransformOptions& o, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const Table table = load_table_file(o.input, table_options(o.table));
    TransformSet set;
    const bool forward = o.direction == "forward";
    if (forward) {
      const Schema schema = o.schema ? Schema::parse_file(*o.schema)
                                     : Schema::defaults(table.names);
      set.names = table.names;
      set.transforms = fit_transforms(schema.align(table.names), table);
      Sink sink(o.transforms, out);
      save_transforms(*sink, set);
    } else if (o.direction == "backward") {
      std::ifstream in(o.transforms);
      if (!in)
        throw DataError("cannot open transforms file '" + o.transforms + "'");
      set = load_transforms(in);
      if (set.names != table.names)
        throw DataError("table columns do not match the transforms file");
    } else {
      throw UsageError("--direction must be forward or backward");
    }

    Sink sink(o.out, out);
    write_row(*sink, table.names, o.table.delimiter);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      std::vector<std::string> cells = table.cells[r];
      for (std::size_t i = 0; i < table.columns(); ++i) {
        const auto& v = table.values[r][i];
        if (!v)
          continue;
        try {
          cells[i] = format_double(forward ? set.transforms[i].apply(*v)
                                           : set.transforms[i].invert(*v));
        } catch (const DomainError& e) {
          throw DataError("row " + std::to_string(r + 1) + ", column '" +
                          table.names[i] + "': " + e.what());
        }
      }
      write_row(*sink, cells, o.table.delimiter);
    }
    return int(exit_ok);
  });
}

int
cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const Model model = load_model_file(o.model);
    const BasisSpec& spec = model.spec();
    for (std::size_t p = 0; p < model.size(); ++p) {
      const MultiIndex& j = spec.selected()[p];
      out << "level " << j.level() << "  " << j.to_string() << "  a="
          << format_double(model.coefficient(p));
      if (p == 0) {
        out << '\n';
        continue;
      }
      const std::uint8_t flags = model.flags(p);
      if (flags & flag_no_evidence) {
        out << "  [NO EVIDENCE]  " << interpretation(j, model.coefficient(p)) << '\n';
        continue;
      }
      out << "  n=" << model.evidence(j.support());
      if (flags & flag_uncertainty_undefined) {
        out << "  sd=undefined  [SINGLE RECORD]";
      } else {
        const double sd = model.uncertainty(p);
        out << "  sd=" << fmt("%.3g", sd) << "  |a|/sd="
            << (sd > 0.0 ? fmt("%.3g", std::abs(model.coefficient(p)) / sd) : "inf");
      }
      out << "  " << interpretation(j, model.coefficient(p)) << '\n';
    }
    return int(exit_ok);
  });
}

} // namespace hcr::cli
