// Executes parsed run and table configurations end to end: relaxation,
// quench propagation, dimension and cost reports, and the consolidated
// multi-cell tables. Results land in files named after the configured
// output prefix; diagnostics go to the given streams.

#pragma once

#include <iosfwd>
#include <string>

#include "rasb/config.hpp"

namespace rasb::runner {

// Process exit codes shared with the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPropagation = 3;

// Runs one task. Writes <prefix>_summary.json always; relax and quench
// tasks additionally write <prefix>_series.csv and <prefix>_density.csv.
// Returns kExitOk, or kExitPropagation after a propagation failure
// (reported on err with the last good time).
int execute_run(const config::RunConfig& cfg, std::ostream& out,
                std::ostream& err);

// Relaxes every cell and writes <prefix>_table.csv plus a summary
// document. A failing cell is recorded in its row and the run continues.
// Cells may be relaxed concurrently; RASB_MAX_THREADS caps the workers.
// Row order always matches the configured cell order.
int execute_tables(const config::TableConfig& cfg, std::ostream& out,
                   std::ostream& err);

}  // namespace rasb::runner
