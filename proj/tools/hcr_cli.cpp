#include "hcr/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hcr::cli;

namespace {

void
table_flags(CLI::App* app, TableFlags& t)
{
  app->add_option("--delimiter", t.delimiter, "Cell separator")->capture_default_str();
  app->add_option("--missing-tokens", t.missing_tokens,
                  "Comma-separated tokens read as missing (empty cells always are)");
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Hierarchical correlation reconstruction: density fitting and imputation" };
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Accepted for reproducible pipelines; every command is deterministic");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a table");
  fit_cmd->add_option("--input", fit.input, "Input table")->required();
  fit_cmd->add_option("--schema", fit.schema, "Schema file");
  fit_cmd->add_option("--orders", fit.orders, "Max order per correlation level, e.g. 2,2")
    ->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Model file ('-' for stdout)")->required();
  table_flags(fit_cmd, fit.table);

  ImputeOptions imp;
  auto* imp_cmd = app.add_subcommand("impute", "Fill missing cells");
  imp_cmd->add_option("--model", imp.model, "Model file")->required();
  imp_cmd->add_option("--input", imp.input, "Table with gaps")->required();
  imp_cmd->add_option("--out", imp.out, "Output table ('-' for stdout)")->default_val("-");
  imp_cmd->add_option("--policy", imp.policy, "expected | top-mode | cluster-split")
    ->check(CLI::IsMember({ "expected", "top-mode", "cluster-split" }))
    ->capture_default_str();
  imp_cmd->add_flag("--report", imp.report, "Add per-cell variance columns");
  table_flags(imp_cmd, imp.table);

  DensityOptions den;
  auto* den_cmd = app.add_subcommand("density", "Evaluate the density or a conditional slice");
  den_cmd->add_option("--model", den.model, "Model file")->required();
  den_cmd->add_option("--point", den.point, "Comma list in original units, '?' marks the free coordinate")
    ->required();
  den_cmd->add_option("--grid", den.grid, "Slice grid size")->capture_default_str();
  den_cmd->add_option("--epsilon", den.epsilon, "Clamp printed densities to at least epsilon");

  RefineOptions ref;
  auto* ref_cmd = app.add_subcommand("refine", "Improve log-likelihood by gradient ascent");
  ref_cmd->add_option("--model", ref.model, "Model file")->required();
  ref_cmd->add_option("--input", ref.input, "Data table")->required();
  ref_cmd->add_option("--out", ref.out, "Refined model file ('-' for stdout)")->required();
  ref_cmd->add_option("--trace", ref.trace, "Objective trace table");
  ref_cmd->add_option("--steps", ref.steps)->capture_default_str();
  ref_cmd->add_option("--rate", ref.rate)->capture_default_str();
  ref_cmd->add_option("--ridge", ref.ridge)->capture_default_str();
  ref_cmd->add_option("--margin", ref.margin, "Positivity margin")->capture_default_str();
  ref_cmd->add_option("--backtrack", ref.backtrack)->capture_default_str();
  ref_cmd->add_flag("--repair", ref.repair, "Repair low-density records before ascent");
  table_flags(ref_cmd, ref.table);

  ReportOptions rep;
  auto* rep_cmd = app.add_subcommand("report", "Describe model coefficients");
  rep_cmd->add_option("--model", rep.model, "Model file")->required();

  TransformOptions tr;
  auto* tr_cmd = app.add_subcommand("transform", "Map a table to or from [0,1] coordinates");
  tr_cmd->add_option("--input", tr.input, "Input table")->required();
  tr_cmd->add_option("--schema", tr.schema, "Schema file (forward only)");
  tr_cmd->add_option("--direction", tr.direction, "forward | backward")
    ->check(CLI::IsMember({ "forward", "backward" }))
    ->capture_default_str();
  tr_cmd->add_option("--out", tr.out, "Output table ('-' for stdout)")->default_val("-");
  tr_cmd->add_option("--transforms", tr.transforms, "Transforms file (written forward, read backward)")
    ->required();
  table_flags(tr_cmd, tr.table);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? int(exit_ok) : int(exit_usage);
  }

  if (*fit_cmd)
    return cmd_fit(fit, std::cout, std::cerr);
  if (*imp_cmd)
    return cmd_impute(imp, std::cout, std::cerr);
  if (*den_cmd)
    return cmd_density(den, std::cout, std::cerr);
  if (*ref_cmd)
    return cmd_refine(ref, std::cout, std::cerr);
  if (*rep_cmd)
    return cmd_report(rep, std::cout, std::cerr);
  return cmd_transform(tr, std::cout, std::cerr);
}
