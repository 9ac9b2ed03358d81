// Command-line driver: single projections plus the benchmark, phase-diagram,
// and multi-task regression experiment harnesses.
//
// Exit codes: 0 success, 1 usage/input error, 2 flagged non-convergence
// (project subcommand only). With an explicit --seed the CSV emitters write
// 0 in place of wall-clock seconds so repeated runs are byte-identical;
// measured times go to standard error instead.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lpball/bench.hpp"
#include "lpball/projector.hpp"
#include "lpball/scalar_prox.hpp"

namespace {

double parse_p(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF")
    return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--p", "not a number: " + text);
  }
  if (used != text.size()) throw CLI::ValidationError("--p", "not a number: " + text);
  return value;
}

std::vector<double> read_input_vector(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open input file: " + path);
    in = &file;
  }
  std::vector<double> values;
  double v = 0.0;
  while (*in >> v) values.push_back(v);
  if (!in->eof()) throw std::invalid_argument("input is not a list of decimal reals");
  if (values.empty()) throw std::invalid_argument("input vector is empty");
  return values;
}

// Opens --out for writing, defaulting to standard output.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::invalid_argument("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int run_project(const std::string& input, const std::string& p_text, double r,
                lpball::Method method, const lpball::SolverConfig& base_config) {
  std::vector<double> y;
  double p = 0.0;
  try {
    y = read_input_vector(input);
    p = parse_p(p_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  lpball::SolverConfig config = base_config;
  config.method = method;
  lpball::ProjectionResult result;
  try {
    result = lpball::project(y, r, p, config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lpball::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  char buf[64];
  for (double v : result.x_star) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::cout << buf << "\n";
  }

  std::cerr << "method: "
            << (result.method_used == lpball::Method::DualNewton      ? "dual_newton"
                : result.method_used == lpball::Method::Bisection     ? "bisection"
                : result.method_used == lpball::Method::ExactSpecial  ? "exact"
                : result.method_used == lpball::Method::NaiveBaseline ? "naive"
                                                                      : "auto")
            << "\n";
  std::cerr << "interior: " << (result.interior ? "yes" : "no") << "\n";
  std::cerr << "iterations: " << result.iterations << "\n";
  std::cerr << "mu_star: " << lpball::format_real(result.mu_star) << "\n";
  std::cerr << "kkt1: " << lpball::format_real(result.diagnostics.kkt1) << "\n";
  if (result.diagnostics.kkt2)
    std::cerr << "kkt2: " << lpball::format_real(*result.diagnostics.kkt2) << "\n";
  std::cerr << "duality_gap: " << lpball::format_real(result.diagnostics.duality_gap) << "\n";
  std::cerr << "norm_ratio: " << lpball::format_real(result.diagnostics.norm_ratio) << "\n";
  std::cerr << "objective: " << lpball::format_real(result.diagnostics.objective) << "\n";
  std::cerr << "seconds: " << lpball::format_real(result.diagnostics.seconds) << "\n";
  std::cerr << "converged: " << (result.converged ? "yes" : "no") << "\n";
  return result.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean projection onto lp-norm balls: solver and experiment harness"};
  app.require_subcommand(1);

  // ---- project ----
  std::string input = "-";
  std::string p_text;
  double r = 1.0;
  lpball::Method method = lpball::Method::Auto;
  lpball::SolverConfig config;
  CLI::App* proj = app.add_subcommand("project", "Project a vector read from a file (or - for stdin)");
  proj->add_option("input", input, "Whitespace-separated reals, or - for stdin")->required();
  proj->add_option("--p", p_text, "Norm power p (> 0, also 0 or inf)")->required();
  proj->add_option("--r", r, "Ball radius")->required();
  const std::map<std::string, lpball::Method> method_names{
      {"auto", lpball::Method::Auto},          {"newton", lpball::Method::DualNewton},
      {"bisection", lpball::Method::Bisection}, {"exact", lpball::Method::ExactSpecial},
      {"naive", lpball::Method::NaiveBaseline}};
  proj->add_option("--method", method, "Solver selection")
      ->transform(CLI::CheckedTransformer(method_names, CLI::ignore_case));
  proj->add_option("--newton-tol", config.newton_obj_tol, "Dual Newton objective stall tolerance");
  proj->add_option("--mu-tol", config.bisect_mu_tol, "Bisection bracket width tolerance");
  proj->add_option("--radius-tol", config.bisect_radius_tol, "Bisection radius agreement tolerance");

  // ---- bench ----
  lpball::BenchOptions bench;
  std::string bench_out;
  CLI::App* cb = app.add_subcommand("bench", "Accuracy/iteration benchmark over random instances");
  cb->add_option("--d", bench.d, "Dimension")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  cb->add_option("--p-list", bench.p_list, "Norm powers to benchmark")->required()->expected(-1);
  cb->add_option("--trials", bench.trials, "Trials per p")->check(CLI::PositiveNumber);
  CLI::Option* bench_seed = cb->add_option("--seed", bench.seed, "PRNG seed; when given explicitly, the secs column is zeroed for reproducible output");
  cb->add_option("--threads", bench.threads, "Worker threads (0 = auto)");
  cb->add_option("--out", bench_out, "Output CSV path (default stdout)");

  // ---- cs-phase ----
  lpball::PhaseOptions phase;
  std::string phase_out;
  CLI::App* cp = app.add_subcommand("cs-phase", "Compressed-sensing phase-transition sweep");
  cp->add_option("--d", phase.d, "Signal dimension");
  cp->add_option("--s-list", phase.s_list, "Sparsity levels")->expected(-1);
  cp->add_option("--m-list", phase.m_list, "Measurement counts")->expected(-1);
  cp->add_option("--p-list", phase.p_list, "Norm powers (0 allowed)")->expected(-1);
  cp->add_option("--trials", phase.trials, "Trials per cell")->check(CLI::PositiveNumber);
  cp->add_option("--iters", phase.iters, "PGD iteration cap")->check(CLI::PositiveNumber);
  cp->add_option("--seed", phase.seed, "PRNG seed");
  cp->add_option("--threads", phase.threads, "Worker threads (0 = auto)");
  cp->add_option("--out", phase_out, "Output CSV path (default stdout)");

  // ---- mtl ----
  lpball::MtlOptions mtl;
  std::string mtl_out;
  CLI::App* cm = app.add_subcommand("mtl", "Row-sparse multi-task regression driver");
  cm->add_option("--d", mtl.d, "Feature dimension (>= 10)");
  cm->add_option("--k", mtl.k, "Number of tasks");
  cm->add_option("--m", mtl.m, "Number of observations");
  cm->add_option("--p-list", mtl.p_list, "Row-norm powers (> 1)")->expected(-1);
  cm->add_option("--tau", mtl.tau, "Regularization weight (default 0.01*d*p)");
  CLI::Option* mtl_seed = cm->add_option("--seed", mtl.seed, "PRNG seed; when given explicitly, the secs column is zeroed for reproducible output");
  cm->add_option("--out", mtl_out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (proj->parsed()) {
      return run_project(input, p_text, r, method, config);
    }
    if (cb->parsed()) {
      bench.suppress_times = bench_seed->count() > 0;
      lpball::BenchResult result = lpball::run_bench(bench);
      OutputTarget out(bench_out);
      lpball::write_bench_csv(out.stream(), result.rows);
      if (bench.suppress_times) {
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
          std::cerr << result.rows[i].method << " p=" << result.rows[i].p
                    << " mean_secs=" << lpball::format_real(result.measured_secs[i]) << "\n";
        }
      }
      return 0;
    }
    if (cp->parsed()) {
      std::vector<lpball::PhaseCell> cells = lpball::run_cs_phase(phase);
      OutputTarget out(phase_out);
      lpball::write_phase_csv(out.stream(), cells);
      return 0;
    }
    if (cm->parsed()) {
      mtl.suppress_times = mtl_seed->count() > 0;
      std::vector<lpball::MtlRow> rows = lpball::run_mtl(mtl);
      OutputTarget out(mtl_out);
      lpball::write_mtl_csv(out.stream(), rows);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
