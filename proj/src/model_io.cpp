#include "hcr/model_io.hpp"

#include "hcr/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hcr {

std::string
encode_name(const std::string& name)
{
  std::string out;
  for (unsigned char c : name) {
    if (c <= 0x20 || c == '%' || c >= 0x7f) {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out.empty() ? "%" : out;
}

std::string
decode_name(const std::string& encoded)
{
  if (encoded == "%")
    return {};
  std::string out;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out += encoded[i];
      continue;
    }
    if (i + 2 >= encoded.size())
      throw DataError("bad percent escape in name '" + encoded + "'");
    unsigned value = 0;
    auto [ptr, ec] =
      std::from_chars(encoded.data() + i + 1, encoded.data() + i + 3, value, 16);
    if (ec != std::errc() || ptr != encoded.data() + i + 3)
      throw DataError("bad percent escape in name '" + encoded + "'");
    out += static_cast<char>(value);
    i += 2;
  }
  return out;
}

namespace {

const char* const kModelMagic = "HCR-MODEL";
const char* const kTransformMagic = "HCR-TRANSFORMS";

const char*
family_name(FamilyKind kind)
{
  switch (kind) {
    case FamilyKind::legendre:
      return "legendre";
    case FamilyKind::trig:
      return "trig";
    case FamilyKind::discrete:
      return "discrete";
  }
  return "?";
}

void
write_transform(std::ostream& out, const Transform& t)
{
  switch (t.kind()) {
    case Transform::Kind::rescale:
      out << "rescale " << format_double(t.min()) << ' ' << format_double(t.max())
          << ' ' << (t.strict() ? 1 : 0);
      break;
    case Transform::Kind::logistic:
      out << "logistic";
      break;
    case Transform::Kind::empirical_cdf:
      out << "ecdf " << t.sample_size() << ' ' << t.support().size();
      for (std::size_t k = 0; k < t.support().size(); ++k)
        out << ' ' << format_double(t.support()[k]) << ' '
            << format_double(t.positions()[k]);
      break;
    case Transform::Kind::categorical:
      out << "categorical " << t.categories().size();
      for (double c : t.categories())
        out << ' ' << format_double(c);
      break;
  }
}

// Whitespace tokenizer over one line with typed, error-reporting reads.
class Tokens
{
public:
  Tokens(std::string line, std::size_t line_no)
    : in_(std::move(line))
    , line_no_(line_no)
  {}

  std::string word(const char* what)
  {
    std::string w;
    if (!(in_ >> w))
      fail(std::string("missing ") + what);
    return w;
  }

  void expect(const char* keyword)
  {
    if (word(keyword) != keyword)
      fail(std::string("expected '") + keyword + "'");
  }

  double real(const char* what)
  {
    const std::string w = word(what);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size())
      fail(std::string("bad ") + what + " '" + w + "'");
    return v;
  }

  long long integer(const char* what, long long lo, long long hi)
  {
    const std::string w = word(what);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size() || v < lo || v > hi)
      fail(std::string("bad ") + what + " '" + w + "'");
    return v;
  }

  void finish()
  {
    std::string extra;
    if (in_ >> extra)
      fail("unexpected trailing '" + extra + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const
  {
    throw DataError("model file line " + std::to_string(line_no_) + ": " + msg);
  }

private:
  std::istringstream in_;
  std::size_t line_no_;
};

class LineReader
{
public:
  explicit LineReader(std::istream& in)
    : in_(in)
  {}

  Tokens next(const char* what)
  {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (!line.empty())
        return Tokens(line, line_no_);
    }
    throw DataError(std::string("model file truncated: expected ") + what);
  }

private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

Transform
read_transform(Tokens& t)
{
  const std::string kind = t.word("transform kind");
  try {
    if (kind == "rescale") {
      const double lo = t.real("rescale min");
      const double hi = t.real("rescale max");
      const bool strict = t.integer("strict flag", 0, 1) == 1;
      return Transform::rescale(lo, hi, strict);
    }
    if (kind == "logistic")
      return Transform::logistic();
    if (kind == "ecdf") {
      const auto l = static_cast<std::size_t>(t.integer("sample size", 0, 1LL << 50));
      const auto count = static_cast<std::size_t>(t.integer("table size", 2, 1LL << 40));
      std::vector<double> xs, ps;
      for (std::size_t k = 0; k < count; ++k) {
        xs.push_back(t.real("ecdf value"));
        ps.push_back(t.real("ecdf position"));
      }
      return Transform::empirical_cdf(std::move(xs), std::move(ps), l);
    }
    if (kind == "categorical") {
      const auto count = static_cast<std::size_t>(t.integer("category count", 2, 1LL << 30));
      std::vector<double> cats;
      for (std::size_t k = 0; k < count; ++k)
        cats.push_back(t.real("category"));
      return Transform::categorical(std::move(cats));
    }
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    t.fail(e.what());
  }
  t.fail("unknown transform '" + kind + "'");
}

} // namespace

void
save_model(std::ostream& out, const Model& model)
{
  const BasisSpec& spec = model.spec();
  const std::size_t d = spec.dimension();
  out << kModelMagic << '\n';
  out << "format_version " << kModelFormatVersion << '\n';
  out << "dimension " << d << '\n';
  out << "level_orders";
  if (spec.level_orders()) {
    for (int m : *spec.level_orders())
      out << ' ' << m;
  } else {
    out << " none";
  }
  out << '\n';
  for (std::size_t i = 0; i < d; ++i) {
    const Family1D& f = spec.family(i);
    out << "coordinate " << i << ' ' << encode_name(model.names()[i]) << ' '
        << family_name(f.kind()) << ' ' << f.max_order() << ' ' << f.num_values()
        << ' ';
    write_transform(out, model.transforms()[i]);
    out << '\n';
  }
  out << "basis " << model.size() << '\n';
  for (std::size_t p = 0; p < model.size(); ++p) {
    const MultiIndex& j = spec.selected()[p];
    out << "entry ";
    for (std::size_t i = 0; i < d; ++i)
      out << (i ? "," : "") << j[i];
    out << ' ' << format_double(model.coefficient(p)) << ' '
        << model.evidence(j.support()) << ' ' << format_double(model.uncertainty(p))
        << ' ' << static_cast<int>(model.flags(p)) << '\n';
  }
  out << "end\n";
}

std::string
model_to_string(const Model& model)
{
  std::ostringstream os;
  save_model(os, model);
  return os.str();
}

void
save_model_file(const std::string& path, const Model& model)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot write model file '" + path + "'");
  save_model(out, model);
  if (!out)
    throw DataError("error writing model file '" + path + "'");
}

Model
load_model(std::istream& in)
{
  LineReader lines(in);
  {
    Tokens t = lines.next("magic header");
    if (t.word("magic header") != kModelMagic)
      t.fail("not a model file (bad magic header)");
    t.finish();
  }
  {
    Tokens t = lines.next("format_version");
    t.expect("format_version");
    const auto v = t.integer("format version", 0, 1 << 20);
    if (v != kModelFormatVersion)
      t.fail("unsupported format_version " + std::to_string(v));
    t.finish();
  }
  std::size_t d = 0;
  {
    Tokens t = lines.next("dimension");
    t.expect("dimension");
    d = static_cast<std::size_t>(t.integer("dimension", 1, 1 << 20));
    t.finish();
  }
  std::optional<std::vector<int>> level_orders;
  {
    Tokens t = lines.next("level_orders");
    t.expect("level_orders");
    const std::string first = t.word("level order");
    if (first != "none") {
      std::vector<int> lo;
      {
        int v = 0;
        auto [ptr, ec] = std::from_chars(first.data(), first.data() + first.size(), v);
        if (ec != std::errc() || ptr != first.data() + first.size() || v < 0)
          t.fail("bad level order '" + first + "'");
        lo.push_back(v);
      }
      for (std::size_t k = 1; k <= d; ++k)
        lo.push_back(static_cast<int>(t.integer("level order", 0, 1 << 20)));
      level_orders = std::move(lo);
    }
    t.finish();
  }

  std::vector<Family1D> families;
  std::vector<std::string> names;
  std::vector<Transform> transforms;
  for (std::size_t i = 0; i < d; ++i) {
    Tokens t = lines.next("coordinate");
    t.expect("coordinate");
    if (static_cast<std::size_t>(t.integer("coordinate index", 0, 1 << 20)) != i)
      t.fail("coordinates out of order");
    names.push_back(decode_name(t.word("name")));
    const std::string family = t.word("family");
    const int max_order = static_cast<int>(t.integer("max order", 0, 1 << 16));
    const int num_values = static_cast<int>(t.integer("value count", 0, 1 << 20));
    try {
      if (family == "legendre")
        families.push_back(Family1D::legendre(max_order));
      else if (family == "trig")
        families.push_back(Family1D::trig(max_order));
      else if (family == "discrete")
        families.push_back(Family1D::discrete(num_values, max_order));
      else
        t.fail("unknown family '" + family + "'");
    } catch (const DomainError& e) {
      t.fail(e.what());
    }
    transforms.push_back(read_transform(t));
    t.finish();
  }

  std::size_t count = 0;
  {
    Tokens t = lines.next("basis");
    t.expect("basis");
    count = static_cast<std::size_t>(t.integer("basis size", 1, 1LL << 40));
    t.finish();
  }

  struct Entry
  {
    MultiIndex index;
    double coefficient;
    std::size_t evidence;
    double uncertainty;
    std::uint8_t flags;
  };
  std::vector<Entry> entries;
  for (std::size_t p = 0; p < count; ++p) {
    Tokens t = lines.next("entry");
    t.expect("entry");
    const std::string orders = t.word("multi-index");
    std::vector<int> j;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = orders.find(',', start);
      const std::string part = orders.substr(start, comma == std::string::npos
                                                       ? std::string::npos
                                                       : comma - start);
      int v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || v < 0)
        t.fail("bad multi-index '" + orders + "'");
      j.push_back(v);
      if (comma == std::string::npos)
        break;
      start = comma + 1;
    }
    if (j.size() != d)
      t.fail("multi-index '" + orders + "' does not have " + std::to_string(d) +
             " entries");
    Entry e{ MultiIndex(std::move(j)), 0.0, 0, 0.0, 0 };
    e.coefficient = t.real("coefficient");
    e.evidence = static_cast<std::size_t>(t.integer("evidence", 0, 1LL << 62));
    e.uncertainty = t.real("uncertainty");
    e.flags = static_cast<std::uint8_t>(t.integer("flags", 0, 255));
    t.finish();
    if (!entries.empty() && !canonical_less(entries.back().index, e.index))
      t.fail("entries are not in canonical order");
    entries.push_back(std::move(e));
  }
  {
    Tokens t = lines.next("end");
    t.expect("end");
    t.finish();
  }

  if (!entries.front().index.is_constant())
    throw DataError("model file: first entry must be the constant");
  if (entries.front().coefficient != 1.0)
    throw DataError("model file: constant coefficient must be 1");

  std::vector<MultiIndex> selected;
  for (const Entry& e : entries)
    selected.push_back(e.index);
  BasisSpec spec;
  try {
    spec = BasisSpec(std::move(families), std::move(selected), std::move(level_orders));
  } catch (const DomainError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  Model model(std::move(spec));
  for (std::size_t p = 0; p < entries.size(); ++p) {
    const Entry& e = entries[p];
    model.set_coefficient(p, e.coefficient);
    model.set_uncertainty(p, e.uncertainty);
    model.set_flags(p, e.flags);
    model.set_evidence(e.index.support(), e.evidence);
  }
  model.set_names(std::move(names));
  model.set_transforms(std::move(transforms));
  return model;
}

Model
load_model_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open model file '" + path + "'");
  return load_model(in);
}

void
save_transforms(std::ostream& out, const TransformSet& set)
{
  out << kTransformMagic << '\n';
  out << "format_version " << kModelFormatVersion << '\n';
  out << "dimension " << set.transforms.size() << '\n';
  for (std::size_t i = 0; i < set.transforms.size(); ++i) {
    out << "coordinate " << i << ' ' << encode_name(set.names[i]) << ' ';
    write_transform(out, set.transforms[i]);
    out << '\n';
  }
  out << "end\n";
}

TransformSet
load_transforms(std::istream& in)
{
  LineReader lines(in);
  {
    Tokens t = lines.next("magic header");
    if (t.word("magic header") != kTransformMagic)
      t.fail("not a transforms file (bad magic header)");
    t.finish();
  }
  {
    Tokens t = lines.next("format_version");
    t.expect("format_version");
    if (t.integer("format version", 0, 1 << 20) != kModelFormatVersion)
      t.fail("unsupported format_version");
    t.finish();
  }
  std::size_t d = 0;
  {
    Tokens t = lines.next("dimension");
    t.expect("dimension");
    d = static_cast<std::size_t>(t.integer("dimension", 1, 1 << 20));
    t.finish();
  }
  TransformSet set;
  for (std::size_t i = 0; i < d; ++i) {
    Tokens t = lines.next("coordinate");
    t.expect("coordinate");
    if (static_cast<std::size_t>(t.integer("coordinate index", 0, 1 << 20)) != i)
      t.fail("coordinates out of order");
    set.names.push_back(decode_name(t.word("name")));
    set.transforms.push_back(read_transform(t));
    t.finish();
  }
  Tokens t = lines.next("end");
  t.expect("end");
  return set;
}

} // namespace hcr
