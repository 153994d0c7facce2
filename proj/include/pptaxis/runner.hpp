#pragma once

// Orchestration behind the command-line tool: single runs with file output,
// (chi, xi) sweeps, constant reports and twin runs.
//
// Exit codes: 0 completed, 2 bound violation, 3 numerical blow-up,
// 1 usage, I/O or solver error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pptaxis/analysis.hpp"
#include "pptaxis/config.hpp"

namespace pptaxis {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitViolation = 2, kExitBlowup = 3 };

struct RunOutcome {
  int exit_code = kExitError;
  /// completed | violated | blowup | solver_failure | error
  std::string outcome;
  std::optional<NormTrace> trace;
  std::optional<BoundReport> bounds;
  std::string message;
};

/// Runs spec and writes norms.csv, snapshot_NNN.csv, metadata.json and
/// bounds_report.txt into out_dir. Never throws.
RunOutcome run_main(const RunSpec& spec, const std::filesystem::path& out_dir);

struct SweepSpec {
  RunSpec base;
  std::vector<double> chi_values;
  std::vector<double> xi_values;
  std::size_t jobs = 1;
};

struct SweepRow {
  double chi = 0.0;
  double xi = 0.0;
  std::string outcome;
  double sup_u = 0.0;
  double sup_v = 0.0;
  double max_c2proxy = 0.0;
  std::optional<std::size_t> picard_iters_max;
};

/// One run per (chi, xi) in point_<i>_<j>/ subdirectories (indices into the
/// sorted, deduplicated lists); sweep.csv lists the rows in lexicographic
/// (chi, xi) order. Point failures are recorded in-row.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string norms_csv(const std::vector<NormRecord>& records);
std::string snapshot_csv(const State& s);

/// Derived constants and admissibility as "key = value" lines.
void print_constants(const RunSpec& spec, std::ostream& os);

/// Twin run from the configured initial data; prints the growth report.
/// 0 when the separation is at most exponential, 2 when not, 3 when a run
/// blew up, 1 otherwise.
int run_twin_test(const RunSpec& spec, double delta, std::ostream& os);

/// Parses "a,b,c" into numbers; throws ConfigError.
std::vector<double> parse_number_list(const std::string& text, const std::string& what);

}  // namespace pptaxis
