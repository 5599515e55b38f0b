#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "binreg/dataset.hpp"

namespace binreg {

struct CsvTable {
  Dataset data;
  std::vector<std::string> predictor_names;
};

/// Reads a header-first CSV. The column named `y` holds 0/1 labels (integer or
/// exact 0.0/1.0); every other column is a numeric predictor, in header order.
/// Errors carry 1-based line and column numbers.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes predictors as x1..xd followed by y, with round-trip precision.
void write_csv(std::ostream& out, const Dataset& ds);

}  // namespace binreg
