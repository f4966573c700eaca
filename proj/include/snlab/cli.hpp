#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "snlab/lab.hpp"

namespace snlab {

enum ExitCode : int { kExitPass = 0, kExitVerdictFailure = 1, kExitUsage = 2, kExitIo = 3 };

// Sectioned key = value text ([model], [run], [tolerances]); see README for
// the grammar. Seed precedence, lowest first: defaults, env_seed, file,
// overrides ("section.key=value"), cli_seed. Errors are ParseError naming
// the key and line (line 0 for overrides).
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                              std::optional<std::uint64_t> env_seed = std::nullopt,
                              std::optional<std::uint64_t> cli_seed = std::nullopt);

// Full effective config in the same format, defaults included; parses back
// to an identical config.
std::string config_to_text(const ExperimentConfig& cfg);

// Verdict table with one line per verdict.
std::string verdict_table(const std::vector<ConvergenceReport>& reports);

// One numeric column from a data file. '#' lines and blank lines are
// skipped. A header row (non-numeric first row) selects the column named
// x, x2 or value, else the last one; headerless files must have one column.
std::vector<double> read_series_csv(std::istream& is);
std::vector<double> read_series_csv_file(const std::string& path);

// Tail estimates of one sample: Hill alpha (k = sqrt(n)), a_n, blocks theta
// (r_n = ceil(n^kappa), threshold exceeded by about n / (25 r_n) points),
// anticluster curve and sign-switch counts.
Json estimate_report(const std::vector<double>& x, double kappa);

// Entry point of the command-line tool; returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snlab
