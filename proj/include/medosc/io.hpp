#pragma once

#include "medosc/decompose.hpp"
#include "medosc/grid.hpp"
#include "medosc/operators.hpp"

#include <json.hpp>

#include <string>

namespace medosc {

using json = nlohmann::ordered_json;

enum class FileFormat { Json, Csv };

FileFormat parse_format(std::string_view name);
/// ".csv" selects CSV, anything else JSON.
FileFormat format_for_path(const std::string& path);

// Function files. Both formats round-trip values bit-exactly.
//   JSON: {"dim", "depth", "origin", "side", "values": [...]}
//   CSV:  "# dim=<n> depth=<L> origin=<x>,<y> side=<s>" then one value per line
json function_to_json(const GridFunction& f);
GridFunction function_from_json(const json& j);
std::string function_to_csv(const GridFunction& f);
GridFunction function_from_csv(const std::string& text);

void write_function(const GridFunction& f, const std::string& path, FileFormat fmt);
GridFunction read_function(const std::string& path);

json tree_to_json(const DecompositionTree& tree);
DecompositionTree tree_from_json(const json& j);

json pointwise_to_json(const PointwiseReport& r, bool include_fields = false);
json sparsity_to_json(const SparsityReport& r, Variant v);

json shift_to_json(const HaarShift& h);
HaarShift shift_from_json(const json& j);

json cube_to_json(const DyadicCube& c);

/// Doubles that may be infinite are written as the string "inf".
json number_or_inf(double x);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace medosc
