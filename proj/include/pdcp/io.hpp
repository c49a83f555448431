#pragma once

#include <string>

#include "pdcp/types.hpp"

namespace pdcp {

// printf %.17g: enough digits to round-trip any double, deterministic across
// runs so repeated commands produce byte-identical CSV bodies.
std::string format_double(double v);

// Header-free comma-separated decimal rows, one matrix row per line. Blank
// lines are skipped; ragged rows or unparsable cells throw ConfigError.
Matrix load_matrix_csv(const std::string& path);

// Same format restricted to a single column or single row.
Vec load_vector_csv(const std::string& path);

}  // namespace pdcp
