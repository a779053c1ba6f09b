#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hcr::cli {

/// Process exit codes.
enum ExitCode : int
{
  exit_ok = 0,
  exit_usage = 1,
  exit_data = 2,
  exit_numeric = 3,
};

/// Table reading options shared by every command.
struct TableFlags
{
  char delimiter = ',';
  /// comma-separated; empty cells are always missing
  std::optional<std::string> missing_tokens;
};

struct FitOptions
{
  std::string input;
  std::optional<std::string> schema;
  /// max order per correlation level 1, 2, ...; missing levels are 0
  std::string orders = "2,2";
  std::string out;
  TableFlags table;
};

struct ImputeOptions
{
  std::string model;
  std::string input;
  std::string out;
  std::string policy = "expected";
  bool report = false;
  TableFlags table;
};

struct DensityOptions
{
  std::string model;
  std::string point;
  int grid = 101;
  std::optional<double> epsilon;
};

struct RefineOptions
{
  std::string model;
  std::string input;
  std::string out;
  std::optional<std::string> trace;
  std::size_t steps = 10;
  double rate = 0.1;
  double ridge = 0.0;
  double margin = 1e-6;
  double backtrack = 0.5;
  bool repair = false;
  TableFlags table;
};

struct TransformOptions
{
  std::string input;
  std::optional<std::string> schema;
  std::string direction = "forward";
  std::string out;
  std::string transforms;
  TableFlags table;
};

struct ReportOptions
{
  std::string model;
};

// Each command writes its primary output to the named file (or `out` when the
// path is "-"), diagnostics to `err`, and returns an ExitCode.
int
cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err);
int
cmd_impute(const ImputeOptions& o, std::ostream& out, std::ostream& err);
int
cmd_density(const DensityOptions& o, std::ostream& out, std::ostream& err);
int
cmd_refine(const RefineOptions& o, std::ostream& out, std::ostream& err);
int
cmd_transform(const TransformOptions& o, std::ostream& out, std::ostream& err);
int
cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err);

/// Column names used in imputation output.
inline constexpr const char* kWeightColumn = "__hcr_weight";
inline constexpr const char* kNoteColumn = "__hcr_note";
inline constexpr const char* kVariancePrefix = "__hcr_var_";

} // namespace hcr::cli
