// Acceptance gate: one self-contained check per numbered criterion, each
// printing exactly one "criterion N: PASS/FAIL" line. Arguments select
// criterion numbers; no arguments runs all nine. Exit code is the number of
// failures.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpball/bench.hpp"
#include "lpball/oracle.hpp"
#include "lpball/projector.hpp"
#include "lpball/rng.hpp"
#include "lpball/scalar_prox.hpp"
#include "lpball/solvers.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double prox_objective(double x, double y, double mu, double p) {
  const double power = x > 0.0 ? std::pow(x, p) : 0.0;
  return 0.5 * (x - y) * (x - y) + (mu > 0.0 ? (mu / p) * power : 0.0);
}

double half_sq_dist(const std::vector<double>& y, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
  return 0.5 * s;
}

std::vector<double> positive_instance(lpball::SplitMix64& gen, std::size_t d) {
  std::vector<double> y(d);
  for (double& v : y) v = std::fabs(gen.next_normal()) + 0.05;
  return y;
}

// ---- criterion 1: scalar prox against the dense oracle ----
bool criterion_1(std::string& note) {
  lpball::SplitMix64 gen = lpball::substream(101, 0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double y = 100.0 * gen.next_uniform();
    const double mu = (t % 97 == 0) ? 0.0 : 100.0 * gen.next_uniform();
    const double p = 5.0 * gen.next_uniform();
    if (p == 1.0 || p == 2.0) continue;

    const lpball::OracleReport ref = lpball::scalar_prox_oracle(y, mu, p);
    const double x = std::fabs(lpball::prox_scalar(y, mu, p).primary);
    const double diff = std::fabs(prox_objective(x, y, mu, p) - ref.best_value) / (1.0 + y * y);
    worst = std::max(worst, diff);
    if (diff > 1e-8) {
      std::ostringstream ss;
      ss << "trial " << t << " y=" << y << " mu=" << mu << " p=" << p << " scaled err " << diff;
      note = ss.str();
      return false;
    }
  }
  std::ostringstream ss;
  ss << "worst scaled objective error " << worst;
  note = ss.str();
  return true;
}

// ---- criterion 2: small-d projections against the branch-sweep oracle ----
bool criterion_2(std::string& note) {
  const std::vector<double> p_set{0.3, 0.5, 0.7, 1.5, 3.0, 10.0};
  lpball::SplitMix64 gen = lpball::substream(102, 0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = (t % 2 == 0) ? 2 : 3;
    const double p = p_set[static_cast<std::size_t>(t) % p_set.size()];
    const std::vector<double> y = positive_instance(gen, d);
    const double r = gen.next_uniform() * lpball::lp_norm(y, p);

    const lpball::OracleReport ref = lpball::projection_oracle(y, r, p);
    const lpball::ProjectionResult res = lpball::project(y, r, p);
    const double excess = half_sq_dist(y, res.x_star) - ref.best_value;
    worst = std::max(worst, excess);
    if (excess > 1e-6) {
      std::ostringstream ss;
      ss << "trial " << t << " d=" << d << " p=" << p << " objective excess " << excess;
      note = ss.str();
      return false;
    }
  }
  std::ostringstream ss;
  ss << "worst objective excess over the oracle " << worst;
  note = ss.str();
  return true;
}

struct RowView {
  const lpball::BenchRow* row = nullptr;
  const std::vector<lpball::TrialMetrics>* trials = nullptr;
};

std::map<std::pair<std::string, double>, RowView> index_rows(const lpball::BenchResult& result) {
  std::map<std::pair<std::string, double>, RowView> out;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    out[{result.rows[i].method, result.rows[i].p}] = {&result.rows[i], &result.trial_data[i]};
  }
  return out;
}

double mean_abs_ratio(const RowView& view) {
  double s = 0.0;
  for (const auto& t : *view.trials) s += std::fabs(t.ratio);
  return s / static_cast<double>(view.trials->size());
}

// ---- criterion 3: high-accuracy table for p > 1 at desk scale ----
bool criterion_3(std::string& note) {
  lpball::BenchOptions opts;
  opts.d = 10000;
  opts.p_list = {1.01, 1.05, 1.1, 1.5, 4.0, 10.0, 100.0};
  opts.trials = 20;
  opts.seed = 103;
  opts.threads = 1;
  opts.suppress_times = true;
  const lpball::BenchResult result = lpball::run_bench(opts);
  const auto rows = index_rows(result);

  std::ostringstream ss;
  for (double p : opts.p_list) {
    const RowView newton = rows.at({"dual_newton", p});
    const RowView bisect = rows.at({"bisection", p});
    const double abs_ratio = mean_abs_ratio(newton);
    const double obj_gap = std::fabs(newton.row->obj - bisect.row->obj);
    if (!(newton.row->kkt1 <= 1e-6) || !(abs_ratio <= 1e-6) || !(newton.row->iters <= 20.0) ||
        !(obj_gap <= 1e-8 * std::max(newton.row->obj, 1e-300))) {
      ss << "p=" << p << " kkt1=" << newton.row->kkt1 << " |ratio|=" << abs_ratio
         << " iters=" << newton.row->iters << " obj gap rel="
         << obj_gap / std::max(newton.row->obj, 1e-300);
      note = ss.str();
      return false;
    }
  }
  ss << "all p: newton kkt1 <= 1e-6, |ratio| <= 1e-6, iters <= 20, methods agree to 1e-8";
  note = ss.str();
  return true;
}

// ---- criterion 4: bisection table for p < 1 at desk scale ----
bool criterion_4(std::string& note) {
  lpball::BenchOptions opts;
  opts.d = 10000;
  opts.p_list = {0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  opts.trials = 20;
  opts.seed = 104;
  opts.threads = 1;
  opts.suppress_times = true;
  const lpball::BenchResult result = lpball::run_bench(opts);
  const auto rows = index_rows(result);

  std::ostringstream ss;
  for (double p : opts.p_list) {
    const RowView bisect = rows.at({"bisection", p});
    const double abs_ratio = mean_abs_ratio(bisect);
    const double gap = bisect.row->kkt2_or_gap;
    if (!(abs_ratio <= 1e-6) || !(gap <= 1e-8)) {
      ss << "p=" << p << " |ratio|=" << abs_ratio << " gap=" << gap;
      note = ss.str();
      return false;
    }
    if (p == 0.1 || p == 0.3) {
      const RowView naive = rows.at({"naive", p});
      const double rel = std::fabs(naive.row->obj - bisect.row->obj) / bisect.row->obj;
      if (!(rel <= 1e-4)) {
        ss << "p=" << p << " naive objective off by " << rel;
        note = ss.str();
        return false;
      }
    }
  }
  ss << "all p: bisection |ratio| <= 1e-6 and gap <= 1e-8; naive within 0.01% at p in {0.1, 0.3}";
  note = ss.str();
  return true;
}

// ---- criterion 5: dual derivatives against finite differences ----
bool criterion_5(std::string& note) {
  lpball::SplitMix64 gen = lpball::substream(105, 0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 5 + static_cast<std::size_t>(20.0 * gen.next_uniform());
    const double p = 1.05 + 9.0 * gen.next_uniform();
    std::vector<double> y = positive_instance(gen, d);
    const double norm = lpball::lp_norm(y, p);
    const double target = 1.2 + 2.0 * gen.next_uniform();
    for (double& v : y) v *= target / norm;  // exterior of the unit ball

    const double bound = lpball::mu_upper_bound(y, p);
    for (int j = 0; j < 5; ++j) {
      const double mu = bound * (0.05 + 0.9 * gen.next_uniform());
      const double h = 1e-6 * std::max(mu, 1.0);
      const lpball::DualEval mid = lpball::eval_dual(y, p, mu);
      const lpball::DualEval hi = lpball::eval_dual(y, p, mu + h);
      const lpball::DualEval lo = lpball::eval_dual(y, p, mu - h);

      const double fd1 = (hi.g - lo.g) / (2.0 * h);
      const double err1 = std::fabs(fd1 - mid.g1) / std::max({std::fabs(mid.g1), std::fabs(fd1), 1e-9});
      const double fd2 = (hi.g1 - lo.g1) / (2.0 * h);
      const double err2 = std::fabs(fd2 - *mid.g2) / std::max({std::fabs(*mid.g2), std::fabs(fd2), 1e-9});
      worst = std::max({worst, err1, err2});
      if (err1 > 1e-5 || err2 > 1e-5) {
        std::ostringstream ss;
        ss << "t=" << t << " p=" << p << " mu=" << mu << " rel errs " << err1 << ", " << err2;
        note = ss.str();
        return false;
      }
    }
    for (int j = 0; j < 50; ++j) {
      const double mu = bound * (static_cast<double>(j) + 0.5) / 50.0;
      const lpball::DualEval ev = lpball::eval_dual(y, p, mu);
      if (!(ev.g2.has_value() && *ev.g2 < 0.0)) {
        std::ostringstream ss;
        ss << "t=" << t << " p=" << p << " concavity lost at mu=" << mu;
        note = ss.str();
        return false;
      }
    }
  }
  std::ostringstream ss;
  ss << "worst derivative mismatch " << worst << "; g'' < 0 on every grid";
  note = ss.str();
  return true;
}

// ---- criterion 6: Moreau decomposition through prox_dual_norm ----
bool criterion_6(std::string& note) {
  const std::vector<double> p_set{1.5, 3.0, 10.0};
  lpball::SplitMix64 gen = lpball::substream(106, 0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double p = p_set[static_cast<std::size_t>(t) % p_set.size()];
    const std::size_t d = 30;
    std::vector<double> y(d);
    for (double& v : y) v = gen.next_normal();
    const double r = (0.1 + 0.8 * gen.next_uniform()) * lpball::lp_norm(y, p);

    const lpball::ProjectionResult res = lpball::project(y, r, p);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(d));
    const double q = p / (p - 1.0);
    const lpball::ProxDualNorm pdn = lpball::prox_dual_norm(v, r, q);
    for (std::size_t i = 0; i < d; ++i) {
      const double err = std::fabs(res.x_star[i] + pdn.value[static_cast<Eigen::Index>(i)] - y[i]) /
                         (1.0 + std::fabs(y[i]));
      worst = std::max(worst, err);
      if (err > 1e-8) {
        std::ostringstream ss;
        ss << "t=" << t << " p=" << p << " coordinate " << i << " residual " << err;
        note = ss.str();
        return false;
      }
    }
  }
  std::ostringstream ss;
  ss << "worst Moreau residual " << worst;
  note = ss.str();
  return true;
}

// ---- criterion 7: compressed-sensing phase ordering ----
bool criterion_7(std::string& note) {
  lpball::PhaseOptions opts;
  opts.seed = 107;
  opts.threads = 1;
  const std::vector<lpball::PhaseCell> cells = lpball::run_cs_phase(opts);

  std::map<double, std::vector<std::pair<int, double>>> by_p;
  for (const auto& c : cells) by_p[c.p].push_back({c.m, c.success_rate});

  std::ostringstream ss;
  for (auto& [p, rates] : by_p) {
    std::sort(rates.begin(), rates.end());
    for (std::size_t i = 1; i < rates.size(); ++i) {
      if (rates[i].second < rates[i - 1].second - 0.15) {
        ss << "p=" << p << " success rate drops from " << rates[i - 1].second << " to "
           << rates[i].second << " at m=" << rates[i].first;
        note = ss.str();
        return false;
      }
    }
  }
  auto min_m_for = [&](double p) {
    int best = std::numeric_limits<int>::max();
    for (const auto& [m, rate] : by_p.at(p)) {
      if (rate >= 0.9) best = std::min(best, m);
    }
    return best;
  };
  const int m_half = min_m_for(0.5), m_one = min_m_for(1.0), m_zero = min_m_for(0.0);
  if (m_half == std::numeric_limits<int>::max()) {
    ss << "p=0.5 never reaches a 90% success rate";
    note = ss.str();
    return false;
  }
  if (!(m_half <= m_one && m_half <= m_zero)) {
    ss << "min m at rate 0.9: p=0.5 needs " << m_half << ", p=1 needs " << m_one
       << ", p=0 needs " << m_zero;
    note = ss.str();
    return false;
  }
  ss << "rates nondecreasing (slack 0.15); min m for 90% recovery: p=0.5 -> " << m_half
     << ", p=1 -> " << m_one << ", p=0 -> " << m_zero;
  note = ss.str();
  return true;
}

// ---- criterion 8: multi-task driver descent and bounded inner iterations ----
bool criterion_8(std::string& note) {
  const std::size_t d = 100, k = 10, m = 200, true_rows = 10;
  std::ostringstream ss;
  for (double p : {1.5, 3.0, 8.0}) {
    const auto t0 = Clock::now();
    lpball::SplitMix64 gen = lpball::substream(108, static_cast<std::uint64_t>(p * 8.0));

    lpball::MultiTaskInstance inst;
    inst.A.resize(m, d);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j) inst.A(i, j) = 2.0 + gen.next_normal();
    Eigen::MatrixXd b_true = Eigen::MatrixXd::Zero(d, k);
    std::vector<std::size_t> rows(d);
    for (std::size_t i = 0; i < d; ++i) rows[i] = i;
    for (std::size_t i = 0; i < true_rows; ++i) {
      const auto j = i + static_cast<std::size_t>(gen.next_uniform() * static_cast<double>(d - i));
      std::swap(rows[i], rows[std::min(j, d - 1)]);
    }
    for (std::size_t i = 0; i < true_rows; ++i)
      for (std::size_t c = 0; c < k; ++c) b_true(rows[i], c) = gen.next_normal();
    inst.Y = inst.A * b_true;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < k; ++c) inst.Y(i, c) += 0.1 * gen.next_normal();
    Eigen::MatrixXd b0 = b_true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t c = 0; c < k; ++c) b0(i, c) += gen.next_normal();
    inst.tau = 0.01 * static_cast<double>(d) * p;
    inst.p = p;

    lpball::SolverConfig config;
    config.newton_obj_tol = 1e-6;
    const lpball::MtlResult res = lpball::mtl_prox_gradient(inst, b0, 1e-3, 10000, config);
    const double secs = seconds_since(t0);

    for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
      if (res.objective_trace[i] >
          res.objective_trace[i - 1] + 1e-12 * (1.0 + std::fabs(res.objective_trace[i - 1]))) {
        ss << "p=" << p << " objective rises at step " << i;
        note = ss.str();
        return false;
      }
    }
    if (res.max_projection_iterations > 20) {
      ss << "p=" << p << " inner projection took " << res.max_projection_iterations << " iterations";
      note = ss.str();
      return false;
    }
    if (secs >= 60.0) {
      ss << "p=" << p << " took " << secs << " s";
      note = ss.str();
      return false;
    }
    ss << "p=" << p << ": " << res.iterations << " outer iters, max inner "
       << res.max_projection_iterations << ", " << secs << " s; ";
  }
  note = ss.str();
  return true;
}

// ---- criterion 9: byte-identical CSV from the CLI under a fixed seed ----
bool criterion_9(std::string& note) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lpball_acceptance";
  fs::create_directories(dir);
  const fs::path a = dir / "bench_a.csv";
  const fs::path b = dir / "bench_b.csv";

  const std::string base = std::string("\"") + LPBALL_CLI_PATH +
                           "\" bench --d 1000 --trials 5 --p-list 1.5 0.5 --seed 42 --threads 1 --out ";
  for (const fs::path* out : {&a, &b}) {
    const std::string cmd = base + out->string() + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      note = "benchmark command failed";
      return false;
    }
  }
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  if (sa.str().empty() || sa.str() != sb.str()) {
    note = "CSV outputs differ between runs";
    return false;
  }
  std::ostringstream ss;
  ss << "two runs, " << sa.str().size() << " identical bytes";
  note = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  using Checker = bool (*)(std::string&);
  const std::vector<Checker> checks{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                    criterion_6, criterion_7, criterion_8, criterion_9};

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(checks.size())) {
      std::cerr << "unknown criterion: " << argv[i] << "\n";
      return 64;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int n = 1; n <= static_cast<int>(checks.size()); ++n) selected.push_back(n);
  }

  int failures = 0;
  for (int n : selected) {
    std::string note;
    bool ok = false;
    try {
      ok = checks[static_cast<std::size_t>(n - 1)](note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << (note.empty() ? "" : " (" + note + ")")
              << std::endl;
  }
  return failures;
}
