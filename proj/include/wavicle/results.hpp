#pragma once

#include <string>
#include <vector>

#include "wavicle/cli.hpp"
#include "wavicle/experiments.hpp"

namespace wavicle {
namespace cli {

// Flat numeric table with named columns; the shape every serialized output
// takes, whether it came from a Monte Carlo run or from the analytic tables.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;
};

// The shared trailing column block of every experiment table.
const std::vector<std::string>& fixed_columns();

// Flatten result rows, checking that each scan block matches the
// experiment's declared columns.
Table to_table(const std::vector<ResultRow>& rows, ExperimentKind kind);

void write_table(const Table& table, OutputFormat format, const std::string& path,
                 const RunMetadata& meta);

}  // namespace cli
}  // namespace wavicle
