#include "toda_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "toda/error.hpp"
#include "toda/log.hpp"
#include "toda/verify.hpp"
#include "toda_cli/plot.hpp"

namespace toda::cli {

namespace {

std::vector<double> numbers_or_number(const io::json& v, const std::string& pointer) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(io::as_number(v[i], pointer + "/" + std::to_string(i)));
  } else {
    out.push_back(io::as_number(v, pointer));
  }
  return out;
}

/// Inline JSON text or the path of a JSON file.
io::json json_argument(const std::string& text, const std::string& pointer) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return io::parse(text, pointer);
  return io::read_json_file(text, pointer);
}

GridPtr require_grid(const RunConfig& c) {
  if (!c.grid) throw SchemaError("/grid", "a grid is required (--grid)");
  return io::grid_from_json(*c.grid, "/grid");
}

WeightDensity require_weight(const RunConfig& c) {
  if (!c.weight) throw SchemaError("/weight", "a weight is required (--weight)");
  return io::weight_from_json(*c.weight, "/weight");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("out", "cannot write " + path);
  out << content;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file(path, content);
  }
}

std::string history_path(const RunConfig& c) {
  const std::string base = c.out.empty() || c.out == "-" ? "toda" : c.out;
  return base + ".residuals.json";
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  const GridPtr grid = require_grid(c);
  const WeightDensity weight = require_weight(c);
  const TodaSolution sol = solve_toda(weight, grid, c.solver);
  const std::string path = c.out.empty() ? "solution.json" : c.out;
  emit(path, io::dump(io::to_json(sol)), out);
  if (path != "-") {
    out << "solved r=" << sol.r << " grid=" << describe(*grid) << " iterations=" << sol.iterations
        << " residual=" << io::format_double(sol.residual_sup) << " -> " << path << '\n';
  }
  return Exit::ok;
}

TodaSolution solution_for(const RunConfig& c) {
  if (!c.solution.empty()) return io::load_solution(c.solution);
  return solve_toda(require_weight(c), require_grid(c), c.solver);
}

int cmd_thermo(const RunConfig& c, std::ostream& out) {
  if (c.betas.size() > 1) throw SchemaError("/beta", "thermo takes a single beta");
  const double beta = c.betas.empty() ? 1.0 : c.betas.front();
  const TodaSolution sol = solution_for(c);
  const ThermoField thermo = compute_thermo(sol, beta, c.reference);
  std::ostringstream csv;
  io::write_thermo_csv(csv, sol, thermo);
  emit(c.out.empty() ? "thermo.csv" : c.out, csv.str(), out);
  return Exit::ok;
}

int cmd_model(const RunConfig& c, std::ostream& out) {
  const std::vector<double> betas = c.betas.empty() ? std::vector<double>{1.0} : c.betas;
  io::json doc;
  if (betas.size() == 1) {
    doc = io::to_json(model_constants(c.r, betas.front()));
  } else {
    doc = io::json::array();
    for (double b : betas) doc.push_back(io::to_json(model_constants(c.r, b)));
  }
  emit(c.out, io::dump(doc), out);
  return Exit::ok;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const GridPtr grid = require_grid(c);
  const WeightDensity weight = require_weight(c);
  if (c.t_values.empty()) throw SchemaError("/t_values", "sweep needs --t-values");
  const std::vector<double> betas = c.betas.empty() ? std::vector<double>{1.0} : c.betas;

  // Each worker solves one t and evaluates every beta; rows land in fixed slots.
  const std::size_t count = c.t_values.size();
  std::vector<std::vector<io::SweepRow>> rows(count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        const double t = c.t_values[k];
        const TodaSolution sol = solve_toda(scale_weight(weight, t), grid, c.solver);
        const Mask& interior = grid->interior_mask();
        for (double beta : betas) {
          const Field s = entropy_field(sol, beta);
          const Field f = free_energy_field(sol, beta, c.reference);
          const RedundancyResult red = redundancy(sol, beta);
          rows[k].push_back({t, beta, inf_over(s, interior), sup_over(s, interior), inf_over(f, interior),
                             sup_over(f, interior), red.lower});
        }
        log::info("sweep: t = ", t, " done");
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  unsigned jobs = c.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : c.jobs;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(count));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  std::vector<io::SweepRow> all;
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  std::ostringstream csv;
  io::write_sweep_csv(csv, all);
  emit(c.out.empty() ? "sweep.csv" : c.out, csv.str(), out);
  return Exit::ok;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  SuiteOptions options;
  options.name = c.suite;
  options.n = c.suite_n;
  options.jobs = c.jobs;
  options.seed = c.seed;
  options.solver = c.solver;
  if (c.grid) {
    const GridPtr g = require_grid(c);
    if (g->mode() != GridMode::cartesian) throw SchemaError("/grid/mode", "verify suites run on cartesian grids");
    options.n = g->n();
    options.rho_max = g->rho_max();
  }
  const std::vector<CheckReport> reports = run_suite(options);
  out << format_table(reports);
  const std::string path = c.out.empty() ? "verify_report.json" : c.out;
  if (path != "-") write_file(path, io::dump(io::to_json(reports)));
  const bool failed = any_blocking(reports);
  out << (failed ? "suite " + c.suite + ": FAILED\n" : "suite " + c.suite + ": passed\n");
  return failed ? Exit::verify_failed : Exit::ok;
}

int cmd_plot(const RunConfig& c, std::ostream& out) {
  if (c.in.empty()) throw SchemaError("/in", "plot needs --in");
  std::ifstream in(c.in);
  if (!in) throw ConfigurationError("in", "cannot open " + c.in);
  const io::Table table = io::read_csv(in);
  emit(c.out.empty() ? c.in + ".svg" : c.out, render_svg(table, c.column), out);
  return Exit::ok;
}

}  // namespace

void apply_config_file(const io::json& doc, RunConfig& config) {
  if (!doc.is_object()) throw SchemaError("", "config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const std::string at = "/" + key;
    const io::json& v = *it;
    if (key == "weight") {
      config.weight = v;
    } else if (key == "grid") {
      config.grid = v;
    } else if (key == "solver") {
      io::apply_solver_json(v, config.solver, at);
    } else if (key == "beta") {
      config.betas = numbers_or_number(v, at);
    } else if (key == "t_values") {
      config.t_values = numbers_or_number(v, at);
    } else if (key == "reference") {
      try {
        config.reference = reference_from_string(io::as_string(v, at));
      } catch (const ConfigurationError& e) {
        throw SchemaError(at, e.what());
      }
    } else if (key == "boundary") {
      try {
        config.solver.boundary = boundary_strategy_from_string(io::as_string(v, at));
      } catch (const ConfigurationError& e) {
        throw SchemaError(at, e.what());
      }
    } else if (key == "out") {
      config.out = io::as_string(v, at);
    } else if (key == "jobs") {
      const int jobs = io::as_int(v, at);
      if (jobs < 0) throw SchemaError(at, "jobs must be >= 0");
      config.jobs = static_cast<unsigned>(jobs);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw SchemaError(at, "expected a nonnegative integer");
      config.seed = v.get<std::uint64_t>();
    } else if (key == "suite") {
      config.suite = io::as_string(v, at);
    } else if (key == "n") {
      config.suite_n = io::as_int(v, at);
    } else if (key == "r") {
      config.r = io::as_int(v, at);
    } else {
      throw SchemaError(at, "unknown config key");
    }
  }
}

void validate(const RunConfig& config) {
  for (std::size_t i = 0; i < config.betas.size(); ++i) {
    if (config.betas[i] == 0.0 || !std::isfinite(config.betas[i])) {
      throw SchemaError("/beta/" + std::to_string(i), "beta must be nonzero and finite");
    }
  }
  for (std::size_t i = 0; i < config.t_values.size(); ++i) {
    if (!(config.t_values[i] > 0.0) || !std::isfinite(config.t_values[i])) {
      throw SchemaError("/t_values/" + std::to_string(i), "t must be positive and finite");
    }
  }
  if (config.command == "model" && config.r < 2) throw SchemaError("/r", "r must be >= 2");
  if (config.command == "verify" && config.suite != "core" && config.suite != "full") {
    throw SchemaError("/suite", "expected core | full");
  }
  if (config.command == "thermo" && !config.solution.empty()) {
    std::ifstream probe(config.solution);
    if (!probe) throw SchemaError("/solution", "cannot open " + config.solution);
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    const std::string& cmd = config.command;
    if (cmd == "solve") return cmd_solve(config, out);
    if (cmd == "thermo") return cmd_thermo(config, out);
    if (cmd == "model") return cmd_model(config, out);
    if (cmd == "sweep") return cmd_sweep(config, out);
    if (cmd == "verify") return cmd_verify(config, out);
    if (cmd == "plot") return cmd_plot(config, out);
    throw SchemaError("/command", "unknown command '" + cmd + "'");
  } catch (const SchemaError& e) {
    err << "error: schema violation at " << e.what() << '\n';
    return Exit::schema_error;
  } catch (const ConvergenceError& e) {
    const std::string path = history_path(config);
    io::json doc{{"message", e.what()}, {"residual_history", e.residual_history()}};
    try {
      write_file(path, io::dump(doc));
      err << "error: " << e.what() << "\nresidual history: " << path << '\n';
    } catch (const Error&) {
      err << "error: " << e.what() << "\n(could not write residual history to " << path << ")\n";
    }
    return Exit::not_converged;
  } catch (const ConfigurationError& e) {
    err << "error: configuration: " << e.what() << '\n';
    return Exit::schema_error;
  } catch (const ValidationError& e) {
    err << "error: validation: " << e.what() << '\n';
    return Exit::schema_error;
  } catch (const DomainError& e) {
    err << "error: domain: " << e.what() << '\n';
    return Exit::schema_error;
  } catch (const StrategyError& e) {
    err << "error: boundary strategy: " << e.what() << '\n';
    return Exit::schema_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Exit::internal_error;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Toda-system solver and entropy toolkit for cyclic Higgs bundles"};
  app.require_subcommand(1, 1);

  struct Raw {
    std::string weight, grid, config, reference, boundary, out, solution, in, column, suite;
    std::vector<double> betas, t_values;
    int r = 2, n = 129;
    unsigned jobs = 0;
    std::uint64_t seed = 0;
  } raw;

  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--weight", raw.weight, "weight JSON (inline or file path)");
    sub->add_option("--grid", raw.grid, "grid JSON (inline or file path)");
    sub->add_option("--boundary", raw.boundary, "model_poincare | weight_flat | exhaustion")
        ->check(CLI::IsMember({"model_poincare", "weight_flat", "exhaustion"}));
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", raw.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", raw.out, "output path ('-' for stdout)");
  };
  auto add_beta = [&](CLI::App* sub) {
    sub->add_option("--beta", raw.betas, "inverse temperature(s), comma separated")->delimiter(',');
  };
  auto add_reference = [&](CLI::App* sub) {
    sub->add_option("--reference", raw.reference, "flat | poincare")->check(CLI::IsMember({"flat", "poincare"}));
  };
  auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", raw.jobs, "worker threads (0 = available parallelism)");
    sub->add_option("--seed", raw.seed, "random seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve the Toda system and write a solution file");
  add_problem(solve);
  add_common(solve);
  add_jobs(solve);

  CLI::App* thermo = app.add_subcommand("thermo", "write distribution, entropy, free energy and redundancy as CSV");
  add_problem(thermo);
  add_common(thermo);
  add_beta(thermo);
  add_reference(thermo);
  thermo->add_option("--solution", raw.solution, "solution file to analyse (otherwise solve)");

  CLI::App* model = app.add_subcommand("model", "print model-case constants as JSON");
  model->add_option("--r", raw.r, "differential order")->required();
  add_beta(model);
  add_common(model);

  CLI::App* sweep = app.add_subcommand("sweep", "scan t and beta, write summary CSV");
  add_problem(sweep);
  add_common(sweep);
  add_beta(sweep);
  add_reference(sweep);
  add_jobs(sweep);
  sweep->add_option("--t-values", raw.t_values, "scales t, comma separated")->delimiter(',');

  CLI::App* verify = app.add_subcommand("verify", "run a check suite");
  verify->add_option("--suite", raw.suite, "core | full")->check(CLI::IsMember({"core", "full"}));
  verify->add_option("--grid", raw.grid, "cartesian grid JSON for the suite instances");
  add_common(verify);
  add_jobs(verify);

  CLI::App* plot = app.add_subcommand("plot", "render a thermo or sweep CSV as SVG");
  plot->add_option("--in", raw.in, "input CSV")->required();
  plot->add_option("--column", raw.column, "column to draw");
  add_common(plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::schema_error;
  }

  RunConfig config;
  config.command = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!raw.config.empty()) apply_config_file(io::read_json_file(raw.config), config);
    if (!raw.weight.empty()) config.weight = json_argument(raw.weight, "/weight");
    if (!raw.grid.empty()) config.grid = json_argument(raw.grid, "/grid");
    if (!raw.boundary.empty()) config.solver.boundary = boundary_strategy_from_string(raw.boundary);
    if (!raw.reference.empty()) config.reference = reference_from_string(raw.reference);
    if (!raw.betas.empty()) config.betas = raw.betas;
    if (!raw.t_values.empty()) config.t_values = raw.t_values;
    if (!raw.out.empty()) config.out = raw.out;
    if (!raw.solution.empty()) config.solution = raw.solution;
    if (!raw.in.empty()) config.in = raw.in;
    if (!raw.column.empty()) config.column = raw.column;
    if (!raw.suite.empty()) config.suite = raw.suite;
    if (sub->get_option_no_throw("--r") != nullptr && sub->count("--r") > 0) config.r = raw.r;
    if (sub->get_option_no_throw("--jobs") != nullptr && sub->count("--jobs") > 0) config.jobs = raw.jobs;
    if (sub->get_option_no_throw("--seed") != nullptr && sub->count("--seed") > 0) config.seed = raw.seed;
  } catch (const SchemaError& e) {
    std::cerr << "error: schema violation at " << e.what() << '\n';
    return Exit::schema_error;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::schema_error;
  }
  return run(config, std::cout, std::cerr);
}

}  // namespace toda::cli
