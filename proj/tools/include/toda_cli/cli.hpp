#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "toda/io.hpp"
#include "toda/thermo.hpp"
#include "toda/toda.hpp"

namespace toda::cli {

/// Process exit codes.
enum Exit : int {
  ok = 0,
  verify_failed = 1,
  schema_error = 2,
  not_converged = 3,
  internal_error = 4,
};

/// Everything one invocation needs. JSON specs are kept raw and parsed in run()
/// so that schema errors carry pointers into the merged document.
struct RunConfig {
  std::string command;  ///< solve | thermo | model | sweep | verify | plot
  std::optional<io::json> weight;
  std::optional<io::json> grid;
  SolverConfig solver;
  std::vector<double> betas;
  std::vector<double> t_values;
  Reference reference = Reference::flat;
  std::string out;
  std::string solution;  ///< thermo input
  std::string in;        ///< plot input
  std::string column;    ///< plot column, empty = default
  int r = 2;             ///< model
  std::string suite = "core";
  int suite_n = 129;
  unsigned jobs = 0;  ///< 0 = available parallelism
  std::uint64_t seed = 0;
};

/// Merges a --config document into `config`. Recognized keys: weight, grid, solver,
/// beta, t_values, reference, boundary, out, jobs, seed, suite, n, r.
void apply_config_file(const io::json& doc, RunConfig& config);

/// Checks cross-field invariants (nonzero beta, positive t, inputs present).
/// Throws SchemaError.
void validate(const RunConfig& config);

/// Executes one command. Human-readable output goes to `out`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs. Returns the exit code.
int main(int argc, char** argv);

}  // namespace toda::cli
