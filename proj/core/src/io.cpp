#include "toda/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "toda/error.hpp"

namespace toda::io {

namespace {

std::string child(const std::string& pointer, std::string_view key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

const json& array_at(const json& obj, std::string_view key, const std::string& pointer) {
  const json& v = member(obj, key, pointer);
  if (!v.is_array()) throw SchemaError(child(pointer, key), "expected an array");
  return v;
}

std::vector<double> number_array(const json& v, const std::string& pointer) {
  if (!v.is_array()) throw SchemaError(pointer, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], child(pointer, i)));
  return out;
}

json number_array_json(std::span<const double> values) {
  json a = json::array();
  for (double v : values) a.push_back(v);
  return a;
}

void write_string(std::ostream& os, const std::string& s) { os << json(s).dump(); }

bool is_number_array(const json& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& e : v) {
    if (!e.is_number()) return false;
  }
  return true;
}

void write_value(std::ostream& os, const json& v, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        write_string(os, it.key());
        os << ": ";
        write_value(os, it.value(), depth + 1);
      }
      os << '\n' << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      if (is_number_array(v)) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i > 0) os << ',';
          write_value(os, v[i], depth + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) os << ",\n";
        os << pad;
        write_value(os, v[i], depth + 1);
      }
      os << '\n' << close_pad << ']';
      return;
    }
    case json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isfinite(d)) {
        os << format_double(d);
      } else {
        os << "null";
      }
      return;
    }
    default: os << v.dump(); return;
  }
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " is not finite");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json parse(std::string_view text, const std::string& pointer) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(pointer, std::string("invalid JSON: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path, const std::string& pointer) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("file", "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), pointer);
}

const json& member(const json& obj, std::string_view key, const std::string& pointer) {
  if (!obj.is_object()) throw SchemaError(pointer, "expected an object");
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw SchemaError(child(pointer, key), "required field is missing");
  return *it;
}

double as_number(const json& v, const std::string& pointer) {
  if (!v.is_number()) throw SchemaError(pointer, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& pointer) {
  if (!v.is_number_integer()) throw SchemaError(pointer, "expected an integer");
  const auto raw = v.get<long long>();
  if (raw < -2147483647LL || raw > 2147483647LL) throw SchemaError(pointer, "integer out of range");
  return static_cast<int>(raw);
}

std::string as_string(const json& v, const std::string& pointer) {
  if (!v.is_string()) throw SchemaError(pointer, "expected a string");
  return v.get<std::string>();
}

json to_json(const Grid& grid) {
  return json{{"mode", std::string(to_string(grid.mode()))}, {"n", grid.n()}, {"rho_max", grid.rho_max()}};
}

GridPtr grid_from_json(const json& v, const std::string& pointer) {
  const std::string mode_name = as_string(member(v, "mode", pointer), child(pointer, "mode"));
  GridMode mode;
  try {
    mode = grid_mode_from_string(mode_name);
  } catch (const Error& e) {
    throw SchemaError(child(pointer, "mode"), e.what());
  }
  const int n = as_int(member(v, "n", pointer), child(pointer, "n"));
  const double rho_max = as_number(member(v, "rho_max", pointer), child(pointer, "rho_max"));
  try {
    return build_grid(mode, n, rho_max);
  } catch (const ConfigurationError& e) {
    throw SchemaError(child(pointer, e.parameter()), e.what());
  }
}

json to_json(const WeightDensity& w) {
  json out{{"kind", std::string(to_string(w.kind))}, {"r", w.r}, {"t", w.t}};
  switch (w.kind) {
    case WeightKind::zero: break;
    case WeightKind::constant: out["c"] = w.c; break;
    case WeightKind::polynomial: {
      json coeffs = json::array();
      for (const auto& a : w.coeffs) coeffs.push_back(json::array({a.real(), a.imag()}));
      out["coeffs"] = coeffs;
      break;
    }
    case WeightKind::radial:
      out["rho_max"] = w.profile_rho_max;
      out["samples"] = number_array_json(w.samples);
      break;
    case WeightKind::samples: out["samples"] = number_array_json(w.samples); break;
  }
  return out;
}

WeightDensity weight_from_json(const json& v, const std::string& pointer) {
  WeightDensity w;
  const std::string kind = as_string(member(v, "kind", pointer), child(pointer, "kind"));
  try {
    w.kind = weight_kind_from_string(kind);
  } catch (const Error& e) {
    throw SchemaError(child(pointer, "kind"), e.what());
  }
  w.r = as_int(member(v, "r", pointer), child(pointer, "r"));
  if (w.r < 2) throw SchemaError(child(pointer, "r"), "r must be >= 2");
  if (v.contains("t")) {
    w.t = as_number(v["t"], child(pointer, "t"));
    if (!(w.t > 0.0)) throw SchemaError(child(pointer, "t"), "t must be positive");
  }
  switch (w.kind) {
    case WeightKind::zero: break;
    case WeightKind::constant:
      w.c = as_number(member(v, "c", pointer), child(pointer, "c"));
      if (!(w.c >= 0.0)) throw SchemaError(child(pointer, "c"), "constant weight must be >= 0");
      break;
    case WeightKind::polynomial: {
      const json& coeffs = array_at(v, "coeffs", pointer);
      const std::string base = child(pointer, "coeffs");
      if (coeffs.empty()) throw SchemaError(base, "polynomial weight needs at least one coefficient");
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const json& pair = coeffs[k];
        if (!pair.is_array() || pair.size() != 2) throw SchemaError(child(base, k), "expected [re, im]");
        w.coeffs.emplace_back(as_number(pair[0], child(child(base, k), 0)), as_number(pair[1], child(child(base, k), 1)));
      }
      break;
    }
    case WeightKind::radial:
      w.profile_rho_max = as_number(member(v, "rho_max", pointer), child(pointer, "rho_max"));
      if (!(w.profile_rho_max > 0.0)) throw SchemaError(child(pointer, "rho_max"), "rho_max must be positive");
      [[fallthrough]];
    case WeightKind::samples: {
      w.samples = number_array(array_at(v, "samples", pointer), child(pointer, "samples"));
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        if (w.samples[i] < 0.0) throw SchemaError(child(child(pointer, "samples"), i), "samples must be >= 0");
      }
      if (w.kind == WeightKind::radial && w.samples.size() < 2) {
        throw SchemaError(child(pointer, "samples"), "radial profile needs at least two samples");
      }
      break;
    }
  }
  return w;
}

void apply_solver_json(const json& v, SolverConfig& config, const std::string& pointer) {
  if (!v.is_object()) throw SchemaError(pointer, "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string& key = it.key();
    const std::string at = child(pointer, key);
    try {
      if (key == "tolerance") {
        config.tolerance = as_number(*it, at);
      } else if (key == "max_newton") {
        config.max_newton = as_int(*it, at);
      } else if (key == "damping") {
        config.damping = as_number(*it, at);
      } else if (key == "max_halvings") {
        config.max_halvings = as_int(*it, at);
      } else if (key == "continuation_steps") {
        config.continuation_steps = as_int(*it, at);
      } else if (key == "boundary") {
        config.boundary = boundary_strategy_from_string(as_string(*it, at));
      } else if (key == "initial_guess") {
        config.initial_guess = initial_guess_from_string(as_string(*it, at));
      } else if (key == "linear_solver") {
        const std::string name = as_string(*it, at);
        if (name == "automatic") {
          config.linear_solver = LinearSolverKind::automatic;
        } else if (name == "direct") {
          config.linear_solver = LinearSolverKind::direct;
        } else if (name == "iterative") {
          config.linear_solver = LinearSolverKind::iterative;
        } else {
          throw SchemaError(at, "expected automatic | direct | iterative");
        }
      } else {
        throw SchemaError(at, "unknown solver option");
      }
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      throw SchemaError(at, e.what());
    }
  }
  try {
    validate(config);
  } catch (const ConfigurationError& e) {
    throw SchemaError(child(pointer, e.parameter()), e.what());
  }
}

json to_json(const ModelConstants& mc) {
  json out{{"r", mc.r}, {"beta", mc.beta}};
  json lambda = json::array();
  for (double l : mc.lambda) lambda.push_back(static_cast<long long>(l));
  out["lambda"] = lambda;
  out["entropy"] = mc.entropy;
  out["c_beta"] = mc.c_beta ? json(*mc.c_beta) : json(nullptr);
  out["d_beta"] = mc.d_beta ? json(*mc.d_beta) : json(nullptr);
  const bool neg_inf = std::isinf(mc.entropy_limit) && mc.entropy_limit < 0.0;
  out["entropy_limit"] = neg_inf ? json(nullptr) : json(mc.entropy_limit);
  out["entropy_limit_neg_inf"] = neg_inf;
  return out;
}

json to_json(const CheckReport& report) {
  json out{{"name", report.name},
           {"instance", report.instance},
           {"status", std::string(to_string(report.status))},
           {"pass", report.pass()},
           {"asserted", report.asserted},
           {"margin", report.margin},
           {"slack", report.slack},
           {"strict", report.strict}};
  if (report.worst) {
    out["worst"] = json{{"node", report.worst->node}, {"x", report.worst->x}, {"y", report.worst->y}};
  } else {
    out["worst"] = nullptr;
  }
  out["notes"] = report.notes;
  json parts = json::array();
  for (const auto& p : report.parts) parts.push_back(to_json(p));
  out["parts"] = parts;
  return out;
}

json to_json(const std::vector<CheckReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

void write(std::ostream& os, const json& v) {
  write_value(os, v, 0);
  os << '\n';
}

std::string dump(const json& v) {
  std::ostringstream os;
  write(os, v);
  return os.str();
}

json to_json(const TodaSolution& sol) {
  json out{{"schema", std::string(kSolutionSchema)},
           {"r", sol.r},
           {"grid", to_json(*sol.grid)},
           {"weight", to_json(sol.weight)},
           {"boundary_strategy", std::string(to_string(sol.boundary))},
           {"residual_sup", finite_or_throw(sol.residual_sup, "residual_sup")},
           {"iterations", sol.iterations},
           {"residual_history", number_array_json(sol.residual_history)}};
  if (!sol.exhaustion_radii.empty()) {
    out["exhaustion"] = json{{"radii", number_array_json(sol.exhaustion_radii)},
                             {"drift", number_array_json(sol.exhaustion_drift)}};
  }
  json w = json::array();
  for (const Field& f : sol.w) {
    if (!f.all_finite()) throw ValidationError("solution field is not finite");
    w.push_back(number_array_json(f.values()));
  }
  out["fields"] = json{{"w", w}, {"v0", number_array_json(sol.v0.values())}};
  return out;
}

TodaSolution solution_from_json(const json& v) {
  const std::string schema = as_string(member(v, "schema", ""), "/schema");
  if (schema != kSolutionSchema) throw SchemaError("/schema", "expected \"" + std::string(kSolutionSchema) + "\"");
  const int r = as_int(member(v, "r", ""), "/r");
  const GridPtr grid = grid_from_json(member(v, "grid", ""), "/grid");
  const WeightDensity weight = weight_from_json(member(v, "weight", ""), "/weight");
  if (weight.r != r) throw SchemaError("/weight/r", "weight order differs from /r");
  BoundaryStrategy boundary;
  try {
    boundary = boundary_strategy_from_string(as_string(member(v, "boundary_strategy", ""), "/boundary_strategy"));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError("/boundary_strategy", e.what());
  }
  const double stored_residual = as_number(member(v, "residual_sup", ""), "/residual_sup");

  const json& fields = member(v, "fields", "");
  const json& w = array_at(fields, "w", "/fields");
  if (w.size() != static_cast<std::size_t>(r - 1)) throw SchemaError("/fields/w", "expected r - 1 fields");
  std::vector<Field> ws;
  for (std::size_t j = 0; j < w.size(); ++j) {
    std::vector<double> values = number_array(w[j], "/fields/w/" + std::to_string(j));
    if (values.size() != grid->size()) {
      throw SchemaError("/fields/w/" + std::to_string(j), "expected one value per grid node");
    }
    ws.emplace_back(grid, std::move(values));
  }
  const std::vector<double> v0 = number_array(array_at(fields, "v0", "/fields"), "/fields/v0");
  if (v0.size() != grid->size()) throw SchemaError("/fields/v0", "expected one value per grid node");

  TodaSolution sol;
  try {
    sol = make_solution(weight, grid, boundary, std::move(ws));
  } catch (const ShapeError& e) {
    throw SchemaError("/weight", e.what());
  }
  if (v.contains("iterations")) sol.iterations = as_int(v["iterations"], "/iterations");
  if (v.contains("residual_history")) sol.residual_history = number_array(v["residual_history"], "/residual_history");
  if (v.contains("exhaustion")) {
    sol.exhaustion_radii = number_array(member(v["exhaustion"], "radii", "/exhaustion"), "/exhaustion/radii");
    sol.exhaustion_drift = number_array(member(v["exhaustion"], "drift", "/exhaustion"), "/exhaustion/drift");
  }
  if (std::abs(sol.residual_sup - stored_residual) > 1e-12) {
    throw SchemaError("/residual_sup", "stored residual " + format_double(stored_residual) +
                                           " does not match the fields (" + format_double(sol.residual_sup) + ")");
  }
  return sol;
}

void save_solution(const std::filesystem::path& path, const TodaSolution& sol) {
  const json doc = to_json(sol);
  std::ofstream out(path);
  if (!out) throw ConfigurationError("out", "cannot write " + path.string());
  write(out, doc);
}

TodaSolution load_solution(const std::filesystem::path& path) { return solution_from_json(read_json_file(path)); }

std::vector<std::string> thermo_csv_columns(const Grid& grid, int r) {
  std::vector<std::string> cols;
  if (grid.mode() == GridMode::cartesian) {
    cols = {"x", "y"};
  } else {
    cols = {"rho"};
  }
  for (int j = 0; j < r; ++j) cols.push_back("p_" + std::to_string(j));
  cols.insert(cols.end(), {"S", "F", "R"});
  return cols;
}

void write_thermo_csv(std::ostream& os, const TodaSolution& sol, const ThermoField& thermo) {
  const Grid& g = *sol.grid;
  os << "# r=" << sol.r << '\n';
  os << "# beta=" << format_double(thermo.beta) << '\n';
  os << "# reference=" << to_string(thermo.reference) << '\n';
  os << "# weight=" << to_json(sol.weight).dump() << '\n';
  os << "# grid=" << to_json(g).dump() << '\n';
  os << "# residual=" << format_double(sol.residual_sup) << '\n';
  const auto cols = thermo_csv_columns(g, sol.r);
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.mode() == GridMode::cartesian) {
      os << format_double(g.x(i)) << ',' << format_double(g.y(i));
    } else {
      os << format_double(g.radius(i));
    }
    for (const Field& p : thermo.p) os << ',' << format_double(p[i]);
    os << ',' << format_double(thermo.entropy[i]) << ',' << format_double(thermo.free_energy[i]) << ','
       << format_double(thermo.redundancy[i]) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  for (std::size_t k = 0; k < kSweepColumns.size(); ++k) os << (k ? "," : "") << kSweepColumns[k];
  os << '\n';
  for (const SweepRow& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.beta) << ',' << format_double(r.inf_s) << ','
       << format_double(r.sup_s) << ',' << format_double(r.inf_f) << ',' << format_double(r.sup_f) << ','
       << format_double(r.lower_redundancy) << '\n';
  }
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] == name) return k;
  }
  throw SchemaError("", "CSV has no column '" + std::string(name) + "'");
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto start = line.find_first_not_of("# ");
      t.metadata.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw SchemaError("", "CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw SchemaError("", "CSV line " + std::to_string(line_no) + ": '" + c + "' is not a number");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw SchemaError("", "CSV has no header row");
  return t;
}

}  // namespace toda::io
