#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "toda/grid.hpp"
#include "toda/thermo.hpp"
#include "toda/toda.hpp"
#include "toda/verify.hpp"
#include "toda/weight.hpp"

namespace toda::io {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kSolutionSchema = "toda-solution/1";

/// Parses JSON text; syntax errors become SchemaError at the document root.
json parse(std::string_view text, const std::string& pointer = "");
json read_json_file(const std::filesystem::path& path, const std::string& pointer = "");

/// Pointer-aware accessors. Each throws SchemaError naming `pointer/key`.
const json& member(const json& obj, std::string_view key, const std::string& pointer);
double as_number(const json& v, const std::string& pointer);
int as_int(const json& v, const std::string& pointer);
std::string as_string(const json& v, const std::string& pointer);

/// {"mode": "cartesian" | "radial", "n": int, "rho_max": real}
json to_json(const Grid& grid);
GridPtr grid_from_json(const json& v, const std::string& pointer = "");

/// {"kind": "zero" | "constant" | "poly" | "radial" | "samples", "r": int, "t": real,
///  "c": real, "coeffs": [[re, im], ...], "samples": [...], "rho_max": real}
/// "c" belongs to the constant kind, "rho_max" to the radial profile.
json to_json(const WeightDensity& w);
WeightDensity weight_from_json(const json& v, const std::string& pointer = "");

/// Overrides fields of `config` from {"tolerance", "max_newton", "damping",
/// "max_halvings", "continuation_steps", "boundary", "initial_guess", "linear_solver"}.
void apply_solver_json(const json& v, SolverConfig& config, const std::string& pointer = "");

json to_json(const ModelConstants& mc);
json to_json(const CheckReport& report);
json to_json(const std::vector<CheckReport>& reports);

/// Serializes with every double printed to 17 significant digits, so values
/// reload bit-identically. Non-finite doubles are written as null.
void write(std::ostream& os, const json& v);
std::string dump(const json& v);

/// Solution documents (schema "toda-solution/1"; arrays in node order).
json to_json(const TodaSolution& sol);
TodaSolution solution_from_json(const json& v);
void save_solution(const std::filesystem::path& path, const TodaSolution& sol);
TodaSolution load_solution(const std::filesystem::path& path);

/// Per-node CSV: '#' metadata lines, then x,y (or rho),p_0..p_{r-1},S,F,R.
void write_thermo_csv(std::ostream& os, const TodaSolution& sol, const ThermoField& thermo);
std::vector<std::string> thermo_csv_columns(const Grid& grid, int r);

/// One row of a (t, beta) sweep.
struct SweepRow {
  double t = 1.0;
  double beta = 1.0;
  double inf_s = 0.0;
  double sup_s = 0.0;
  double inf_f = 0.0;
  double sup_f = 0.0;
  double lower_redundancy = 0.0;
};
inline const std::vector<std::string> kSweepColumns{"t", "beta", "inf_S", "sup_S", "inf_F", "sup_F",
                                                   "lower_redundancy"};
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// A parsed CSV file: metadata lines (without '#'), header, numeric rows.
struct Table {
  std::vector<std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Column index; throws SchemaError if absent.
  std::size_t column(std::string_view name) const;
};
Table read_csv(std::istream& is);

/// "%.17g".
std::string format_double(double v);

}  // namespace toda::io
