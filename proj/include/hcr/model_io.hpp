#pragma once

#include "hcr/dataset.hpp"
#include "hcr/estimator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hcr {

inline constexpr int kModelFormatVersion = 1;

/// Line-oriented text model file:
///
///   HCR-MODEL
///   format_version 1
///   dimension <d>
///   level_orders <m_0> .. <m_d> | level_orders none
///   coordinate <i> <name> <family> <max_order> <num_values> <transform...>
///   basis <count>
///   entry <j_1,..,j_d> <coefficient> <evidence> <uncertainty> <flags>
///   end
///
/// Entries appear in canonical multi-index order. Reals use 17 significant
/// digits so that loading reproduces every coefficient exactly. Names are
/// percent-encoded (whitespace and '%').
void
save_model(std::ostream& out, const Model& model);
std::string
model_to_string(const Model& model);
void
save_model_file(const std::string& path, const Model& model);

/// Throws DataError for anything malformed, including unsorted entries.
Model
load_model(std::istream& in);
Model
load_model_file(const std::string& path);

/// Named per-coordinate transforms written by the forward transform command.
struct TransformSet
{
  std::vector<std::string> names;
  std::vector<Transform> transforms;
};

void
save_transforms(std::ostream& out, const TransformSet& set);
TransformSet
load_transforms(std::istream& in);

std::string
encode_name(const std::string& name);
std::string
decode_name(const std::string& encoded);

} // namespace hcr
