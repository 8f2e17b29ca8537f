// Acceptance run: one [PASS]/[FAIL] line per criterion, details as [INFO].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "toda/io.hpp"
#include "toda/verify.hpp"
#include "toda_cli/cli.hpp"

using namespace toda;
namespace fs = std::filesystem;

namespace {

constexpr int kN = 129;
constexpr double kRho = 0.9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void info(const std::string& line) { std::cout << "[INFO]   " << line << '\n'; }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Prints the report's table lines as INFO and returns whether it is non-blocking.
bool report_ok(const CheckReport& rep) {
  std::istringstream table(format_table({rep}));
  for (std::string line; std::getline(table, line);) {
    if (!line.empty()) info(line);
  }
  return !rep.blocking();
}

const GridPtr& grid() {
  static const GridPtr g = build_grid(GridMode::cartesian, kN, kRho);
  return g;
}

/// Solutions shared between criteria, keyed by description.
const TodaSolution& cached(const std::string& key, const std::function<TodaSolution()>& make) {
  static std::map<std::string, TodaSolution> cache;
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make()).first;
  return it->second;
}

const TodaSolution& z_solution(int r) {
  return cached("z" + std::to_string(r), [r] { return solve_toda(polynomial_weight(r, {0.0, 1.0}), grid()); });
}

const TodaSolution& model_solution(int r) {
  return cached("model" + std::to_string(r), [r] { return solve_toda(zero_weight(r), grid()); });
}

const TodaSolution& flat_solution(int r) {
  return cached("flat" + std::to_string(r), [r] {
    SolverConfig cfg;
    cfg.boundary = BoundaryStrategy::weight_flat;
    return solve_toda(constant_weight(r, 1.0), grid(), cfg);
  });
}

bool c1_flat() {
  bool ok = true;
  for (int r = 2; r <= 6; ++r) {
    const auto t0 = Clock::now();
    SolverConfig cfg;
    cfg.boundary = BoundaryStrategy::weight_flat;
    const TodaSolution sol = solve_toda(constant_weight(r, 1.0), grid(), cfg);
    const double secs = seconds_since(t0);
    double sup_w = 0.0;
    for (const Field& wj : sol.w) sup_w = std::max(sup_w, sup_norm(wj, grid()->all_mask()));
    const bool pass = sol.residual_sup <= 1e-10 && sol.iterations <= 3 && sup_w <= 1e-10 && secs < 5.0;
    info("r=" + std::to_string(r) + " residual " + sci(sol.residual_sup) + ", newton steps " +
         std::to_string(sol.iterations) + ", sup|w| " + sci(sup_w) + ", " + sci(secs) + " s" + (pass ? "" : "  <-- fails"));
    ok = ok && pass;
  }
  return ok;
}

bool c2_model() {
  const auto t0 = Clock::now();
  const std::vector<int> levels{65, 129, 257};
  const double collar = 3.0 * build_grid(GridMode::cartesian, levels.front(), kRho)->spacing();
  bool ok = true;
  for (int r = 2; r <= 4; ++r) {
    std::vector<double> errors;
    for (int n : levels) {
      const TodaSolution sol = solve_toda(zero_weight(r), build_grid(GridMode::cartesian, n, kRho));
      const auto exact = model_fields(sol.grid, r);
      const Mask region = sol.grid->collar_mask(collar);
      double err = 0.0;
      for (std::size_t j = 0; j < sol.w.size(); ++j) {
        for (std::size_t i = 0; i < sol.grid->size(); ++i) {
          if (region[i]) err = std::max(err, std::abs(sol.w[j][i] - exact[j][i]));
        }
      }
      errors.push_back(err);
    }
    std::string line = "r=" + std::to_string(r) + " errors";
    for (double e : errors) line += " " + sci(e);
    line += ", orders";
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
      const double order = std::log2(errors[k] / errors[k + 1]);
      line += " " + std::to_string(order);
      ok = ok && order >= 1.7 && order <= 2.3;
    }
    info(line);
  }
  const double secs = seconds_since(t0);
  info("total " + std::to_string(secs) + " s (limit 120 s)");
  return ok && secs < 120.0;
}

double dai_li_margin(const CheckReport& rep) {
  double m = rep.margin;
  for (const CheckReport& p : rep.parts) m = std::min(m, p.margin);
  return m;
}

bool c3_dai_li() {
  const CheckReport rep = check_dai_li_band(z_solution(4));
  const bool checked = report_ok(rep);
  const double margin = dai_li_margin(rep);
  info("worst margin on cartesian/129/0.9: " + sci(margin) + " (required > 1e-6)");
  const CheckReport inner =
      check_dai_li_band(solve_toda(polynomial_weight(4, {0.0, 1.0}), build_grid(GridMode::cartesian, kN, 0.5)));
  info("for comparison, worst margin on cartesian/129/0.5: " + sci(dai_li_margin(inner)));
  return checked && rep.status == CheckStatus::passed && margin > 1e-6;
}

bool c4_entropy() {
  bool ok = true;
  for (int r = 2; r <= 4; ++r) {
    for (double beta : {-1.0, 1.0}) {
      const CheckReport rep = check_entropy_bounds(z_solution(r), beta);
      ok = report_ok(rep) && rep.status != CheckStatus::failed && ok;
    }
  }
  return ok;
}

bool c5_limit() {
  const auto t0 = Clock::now();
  const double limit = std::log(6.0) - 5.0 / 3.0;
  const double c1 = beta_integral_c(1.0);
  const double d1 = beta_integral_d(1.0);
  info("c_1 = " + io::format_double(c1) + ", d_1 = " + io::format_double(d1));
  bool ok = std::abs(c1 - 1.0 / 6.0) <= 1e-9 && std::abs(d1 + 5.0 / 36.0) <= 1e-9;
  const double reported = model_constants(2000, 1.0).entropy_limit;
  info("entropy_limit = " + io::format_double(reported) + ", log 6 - 5/3 = " + io::format_double(limit));
  ok = ok && std::abs(reported - limit) <= 1e-9;
  double previous = INFINITY;
  for (int r : {100, 500, 2000}) {
    const double gap = std::abs(model_entropy(r, 1.0) - std::log(static_cast<double>(r)) - limit);
    info("r=" + std::to_string(r) + " |S_model - log r - limit| = " + sci(gap));
    ok = ok && gap < previous;
    previous = gap;
  }
  ok = ok && previous < 0.02;
  const double secs = seconds_since(t0);
  info(std::to_string(secs) + " s (limit 5 s)");
  return ok && secs < 5.0;
}

bool c6_monotonicity() {
  const auto t0 = Clock::now();
  const CheckReport rep = check_monotonicity_in_t(polynomial_weight(2, {0.0, 1.0}), 1.0, {0.5, 1.0, 2.0}, grid());
  bool ok = report_ok(rep) && rep.status == CheckStatus::passed;
  for (const CheckReport& p : rep.parts) ok = ok && p.asserted && p.status == CheckStatus::passed;
  const double secs = seconds_since(t0);
  info(std::to_string(secs) + " s (limit 60 s)");
  return ok && secs < 60.0;
}

bool c7_free_energy() {
  std::map<int, double> c;
  for (int r = 2; r <= 4; ++r) {
    c[r] = calibrate_fe_slack(grid(), r);
    info("calibrated c for r=" + std::to_string(r) + ": " + sci(c[r]));
  }
  bool ok = true;
  for (double beta : {1.0, 2.0}) {
    for (int r : {2, 3}) ok = report_ok(check_fe_inequality(flat_solution(r), beta, c[r])) && ok;
    for (int r : {2, 3}) ok = report_ok(check_fe_inequality(model_solution(r), beta, c[r])) && ok;
    for (int r : {2, 3, 4}) ok = report_ok(check_fe_inequality(z_solution(r), beta, c[r])) && ok;
  }
  return ok;
}

bool c8_redundancy() {
  const RedundancyResult z = redundancy(z_solution(2), 1.0);
  info("q = z, r=2, beta=1: lower_redundancy " + sci(z.lower));
  bool ok = z.lower > 0.0;
  for (int r = 2; r <= 4; ++r) {
    const double expected = 1.0 - model_entropy(r, 1.0) / std::log(static_cast<double>(r));
    const RedundancyResult m = redundancy(model_solution(r), 1.0);
    const double err = std::max(std::abs(m.lower - expected), std::abs(m.upper - expected));
    info("model r=" + std::to_string(r) + ": |R - (1 - S_model/log r)| " + sci(err));
    ok = ok && err <= 1e-10;
  }
  return ok;
}

/// Runs every CLI artifact twice into separate directories and compares bytes.
bool c9_determinism() {
  const fs::path root = fs::temp_directory_path() / "toda_acceptance";
  fs::remove_all(root);
  const io::json weight = io::json::parse(R"({"kind":"poly","r":3,"coeffs":[[0,0],[1,0]]})");
  const io::json g = io::json::parse(R"({"mode":"cartesian","n":65,"rho_max":0.9})");
  std::vector<std::string> files;
  std::vector<fs::path> dirs;
  bool ok = true;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = root / ("run" + std::to_string(pass));
    fs::create_directories(dir);
    dirs.push_back(dir);
    const auto run = [&](cli::RunConfig cfg, const std::string& file) {
      cfg.out = (dir / file).string();
      std::ostringstream sink;
      const int code = cli::run(cfg, sink, sink);
      // A failing suite still writes its report, which is what is compared here.
      const bool wrote = code == cli::Exit::ok || (cfg.command == "verify" && code == cli::Exit::verify_failed);
      if (pass == 0 && code != cli::Exit::ok) info(cfg.command + " exited " + std::to_string(code));
      if (!wrote) {
        info(sink.str());
        ok = false;
      }
      if (pass == 0) files.push_back(file);
    };
    cli::RunConfig solve;
    solve.command = "solve";
    solve.weight = weight;
    solve.grid = g;
    run(solve, "solution.json");

    cli::RunConfig thermo;
    thermo.command = "thermo";
    thermo.solution = (dir / "solution.json").string();
    thermo.betas = {-1.0};
    run(thermo, "thermo.csv");

    cli::RunConfig sweep = solve;
    sweep.command = "sweep";
    sweep.betas = {-1.0, 1.0};
    sweep.t_values = {0.5, 1.0, 2.0};
    run(sweep, "sweep.csv");

    cli::RunConfig model;
    model.command = "model";
    model.r = 5;
    model.betas = {-2.0, 1.0};
    run(model, "model.json");

    cli::RunConfig plot;
    plot.command = "plot";
    plot.in = (dir / "thermo.csv").string();
    run(plot, "thermo.svg");
    plot.in = (dir / "sweep.csv").string();
    run(plot, "sweep.svg");

    cli::RunConfig verify;
    verify.command = "verify";
    verify.suite = "core";
    verify.suite_n = 65;
    run(verify, "verify_report.json");
  }
  for (const std::string& f : files) {
    const auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string a = slurp(dirs[0] / f);
    const bool same = !a.empty() && a == slurp(dirs[1] / f);
    info(f + (same ? " identical (" + std::to_string(a.size()) + " bytes)" : " DIFFERS"));
    ok = ok && same;
  }
  // Re-running a criterion's checks gives identical reports.
  const auto dump = [](const CheckReport& r) { return io::dump(io::to_json(r)); };
  const bool reports_same = dump(check_entropy_bounds(z_solution(3), -1.0)) == dump(check_entropy_bounds(z_solution(3), -1.0)) &&
                            dump(check_dai_li_band(z_solution(4))) == dump(check_dai_li_band(z_solution(4)));
  info(std::string("repeated check reports ") + (reports_same ? "identical" : "DIFFER"));
  return ok && reports_same;
}

struct Criterion {
  const char* id;
  const char* title;
  bool (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"C1", "flat closed form, r = 2..6, n = 129", c1_flat},
      {"C2", "model closed form, order in [1.7, 2.3] over n = 65, 129, 257", c2_model},
      {"C3", "Dai-Li band for q = z, r = 4, margin > 1e-6", c3_dai_li},
      {"C4", "entropy sandwich for q = z, r = 2..4, beta = -1, 1", c4_entropy},
      {"C5", "asymptotic entropy limit and c_1, d_1", c5_limit},
      {"C6", "monotonicity in t for q = z, r = 2, beta = 1", c6_monotonicity},
      {"C7", "free-energy differential inequality", c7_free_energy},
      {"C8", "redundancy positivity and model redundancy", c8_redundancy},
      {"C9", "bit-identical output on re-run", c9_determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    std::cout << "---- " << c.id << ": " << c.title << '\n' << std::flush;
    const auto t0 = Clock::now();
    bool pass = false;
    try {
      pass = c.run();
    } catch (const std::exception& e) {
      info(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.id, c.title, seconds_since(t0));
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
