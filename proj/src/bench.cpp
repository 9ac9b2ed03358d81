#include "lpball/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lpball/dual_objective.hpp"
#include "lpball/rng.hpp"
#include "lpball/solvers.hpp"

namespace lpball {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Runs fn(0..n-1) on a small worker pool; any worker exception is rethrown
// after the join. Task results must go into per-task slots so aggregation
// stays schedule-independent.
void run_parallel(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> draw_normals(SplitMix64& gen, std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) v = gen.next_normal();
  return out;
}

// First `count` slots of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> draw_support(SplitMix64& gen, std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen.next_uniform() * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  idx.resize(count);
  return idx;
}

double mean_of(const std::vector<TrialMetrics>& trials, double TrialMetrics::* field) {
  double sum = 0.0;
  for (const TrialMetrics& t : trials) sum += t.*field;
  return sum / static_cast<double>(trials.size());
}

struct MethodSpec {
  const char* name;
  Method method;
};

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (v > 1e10) return "inf";
  if (v < -1e10) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

BenchResult run_bench(const BenchOptions& opts) {
  if (opts.d < 2) throw std::invalid_argument("bench: d must be >= 2");
  if (opts.trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
  for (double p : opts.p_list) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("bench: p values must be finite and > 0");
  }

  BenchResult result;
  const std::size_t trials = static_cast<std::size_t>(opts.trials);
  for (std::size_t pi = 0; pi < opts.p_list.size(); ++pi) {
    const double p = opts.p_list[pi];
    std::vector<MethodSpec> methods;
    methods.push_back({"naive", Method::NaiveBaseline});
    if (p > 1.0) methods.push_back({"dual_newton", Method::DualNewton});
    methods.push_back({"bisection", Method::Bisection});

    std::vector<std::vector<TrialMetrics>> per_method(methods.size(), std::vector<TrialMetrics>(trials));
    run_parallel(trials, opts.threads, [&](std::size_t t) {
      SplitMix64 gen = substream(opts.seed, pi * trials + t);
      std::vector<double> y = draw_normals(gen, opts.d);
      const double r = gen.next_uniform() * lp_norm(y, p);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        SolverConfig config = opts.config;
        config.method = methods[mi].method;
        ProjectionResult proj = project(y, r, p, config);
        TrialMetrics& metrics = per_method[mi][t];
        metrics.iters = static_cast<double>(proj.iterations);
        metrics.secs = proj.diagnostics.seconds;
        metrics.kkt1 = proj.diagnostics.kkt1;
        metrics.obj = proj.diagnostics.objective;
        metrics.ratio = proj.diagnostics.norm_ratio;
        metrics.kkt2_or_gap =
            p > 1.0 ? proj.diagnostics.kkt2.value_or(kNan) : proj.diagnostics.duality_gap;
      }
    });

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const std::vector<TrialMetrics>& data = per_method[mi];
      BenchRow row;
      row.method = methods[mi].name;
      row.p = p;
      row.trials = opts.trials;
      row.seed = opts.seed;
      row.iters = mean_of(data, &TrialMetrics::iters);
      row.kkt1 = mean_of(data, &TrialMetrics::kkt1);
      row.obj = mean_of(data, &TrialMetrics::obj);
      row.ratio = mean_of(data, &TrialMetrics::ratio);

      double gap_sum = 0.0;
      std::size_t gap_defined = 0;
      for (const TrialMetrics& t : data) {
        if (!std::isnan(t.kkt2_or_gap)) {
          gap_sum += t.kkt2_or_gap;
          ++gap_defined;
        }
      }
      row.kkt2_or_gap = gap_defined > 0 ? gap_sum / static_cast<double>(gap_defined) : kNan;
      row.pct_nan = p < 1.0
                        ? 100.0 * static_cast<double>(trials - gap_defined) / static_cast<double>(trials)
                        : kNan;

      const double secs = mean_of(data, &TrialMetrics::secs);
      row.secs = opts.suppress_times ? 0.0 : secs;
      result.measured_secs.push_back(secs);
      result.rows.push_back(std::move(row));
      result.trial_data.push_back(std::move(per_method[mi]));
    }
  }
  return result;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "method,p,iters,secs,kkt1,kkt2_or_gap,obj,ratio,pct_nan,trials,seed\n";
  for (const BenchRow& r : rows) {
    os << r.method << ',' << format_real(r.p) << ',' << format_real(r.iters) << ','
       << format_real(r.secs) << ',' << format_real(r.kkt1) << ',' << format_real(r.kkt2_or_gap)
       << ',' << format_real(r.obj) << ',' << format_real(r.ratio) << ',' << format_real(r.pct_nan)
       << ',' << r.trials << ',' << r.seed << '\n';
  }
}

std::vector<PhaseCell> run_cs_phase(const PhaseOptions& opts) {
  if (opts.s_list.empty() || opts.m_list.empty() || opts.p_list.empty())
    throw std::invalid_argument("cs-phase: lists must be nonempty");
  if (opts.trials < 1) throw std::invalid_argument("cs-phase: trials must be >= 1");
  for (int s : opts.s_list) {
    if (s < 1 || static_cast<std::size_t>(s) > opts.d)
      throw std::invalid_argument("cs-phase: sparsity must lie in [1, d]");
  }
  for (double p : opts.p_list) {
    if (std::isnan(p) || p < 0.0 || std::isinf(p))
      throw std::invalid_argument("cs-phase: p values must be finite and >= 0");
  }
  for (int m : opts.m_list) {
    if (m < 1) throw std::invalid_argument("cs-phase: m must be >= 1");
  }

  const std::size_t trials = static_cast<std::size_t>(opts.trials);
  const std::size_t cells = opts.p_list.size() * opts.s_list.size() * opts.m_list.size();
  std::vector<char> success(cells * trials, 0);

  run_parallel(cells * trials, opts.threads, [&](std::size_t task) {
    const std::size_t cell = task / trials;
    std::size_t rest = cell;
    const std::size_t mi = rest % opts.m_list.size();
    rest /= opts.m_list.size();
    const std::size_t si = rest % opts.s_list.size();
    const std::size_t pi = rest / opts.s_list.size();

    const double p = opts.p_list[pi];
    const std::size_t s = static_cast<std::size_t>(opts.s_list[si]);
    const std::size_t m = static_cast<std::size_t>(opts.m_list[mi]);

    SplitMix64 gen = substream(opts.seed, task);
    // Draw order: support indices, signal values, then the sensing matrix
    // row by row.
    const std::vector<std::size_t> support = draw_support(gen, opts.d, s);
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(opts.d));
    for (std::size_t i : support) x_true[static_cast<Eigen::Index>(i)] = gen.next_normal();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(opts.d));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = gen.next_normal();

    LeastSquaresInstance inst;
    inst.A = std::move(A);
    inst.b = inst.A * x_true;
    inst.step = 1.0 / static_cast<double>(m);
    inst.p = p;
    if (p == 0.0) {
      inst.radius = static_cast<double>(s);
    } else {
      std::vector<double> xt(x_true.data(), x_true.data() + x_true.size());
      inst.radius = lp_norm(xt, p);
    }

    PgdResult res = pgd(inst, x_true, Eigen::VectorXd(), opts.iters, 1e-3, opts.config);
    success[task] = res.success ? 1 : 0;
  });

  std::vector<PhaseCell> out;
  out.reserve(cells);
  std::size_t cell = 0;
  for (std::size_t pi = 0; pi < opts.p_list.size(); ++pi) {
    for (std::size_t si = 0; si < opts.s_list.size(); ++si) {
      for (std::size_t mi = 0; mi < opts.m_list.size(); ++mi, ++cell) {
        int wins = 0;
        for (std::size_t t = 0; t < trials; ++t) wins += success[cell * trials + t];
        PhaseCell c;
        c.m = opts.m_list[mi];
        c.sparsity = opts.s_list[si];
        c.p = opts.p_list[pi];
        c.trials = opts.trials;
        c.success_rate = static_cast<double>(wins) / static_cast<double>(trials);
        out.push_back(c);
      }
    }
  }
  return out;
}

void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
  os << "m,sparsity,p,success_rate,trials\n";
  for (const PhaseCell& c : cells) {
    os << c.m << ',' << c.sparsity << ',' << format_real(c.p) << ','
       << format_real(c.success_rate) << ',' << c.trials << '\n';
  }
}

std::vector<MtlRow> run_mtl(const MtlOptions& opts) {
  constexpr std::size_t kTrueRows = 10;
  if (opts.d < kTrueRows) throw std::invalid_argument("mtl: d must be >= 10");
  if (opts.k < 1 || opts.m < 1) throw std::invalid_argument("mtl: k and m must be >= 1");
  for (double p : opts.p_list) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("mtl: p values must be finite and > 1");
  }

  std::vector<MtlRow> rows;
  rows.reserve(opts.p_list.size());
  for (std::size_t pi = 0; pi < opts.p_list.size(); ++pi) {
    const double p = opts.p_list[pi];
    SplitMix64 gen = substream(opts.seed, pi);

    // Draw order: A, support rows, true coefficients, noise, start offset.
    MultiTaskInstance inst;
    inst.A.resize(static_cast<Eigen::Index>(opts.m), static_cast<Eigen::Index>(opts.d));
    for (Eigen::Index i = 0; i < inst.A.rows(); ++i)
      for (Eigen::Index j = 0; j < inst.A.cols(); ++j) inst.A(i, j) = 2.0 + gen.next_normal();

    const std::vector<std::size_t> support = draw_support(gen, opts.d, kTrueRows);
    Eigen::MatrixXd b_true = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(opts.d),
                                                   static_cast<Eigen::Index>(opts.k));
    for (std::size_t row : support)
      for (Eigen::Index j = 0; j < b_true.cols(); ++j)
        b_true(static_cast<Eigen::Index>(row), j) = gen.next_normal();

    inst.Y = inst.A * b_true;
    for (Eigen::Index i = 0; i < inst.Y.rows(); ++i)
      for (Eigen::Index j = 0; j < inst.Y.cols(); ++j) inst.Y(i, j) += 0.1 * gen.next_normal();

    Eigen::MatrixXd b0 = b_true;
    for (Eigen::Index i = 0; i < b0.rows(); ++i)
      for (Eigen::Index j = 0; j < b0.cols(); ++j) b0(i, j) += gen.next_normal();

    inst.p = p;
    inst.tau = opts.tau >= 0.0 ? opts.tau : 0.01 * static_cast<double>(opts.d) * p;

    const auto start = std::chrono::steady_clock::now();
    MtlResult fit = mtl_prox_gradient(inst, b0, opts.rel_tol, opts.max_iters, opts.config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<char> truth(opts.d, 0);
    for (std::size_t row : support) truth[row] = 1;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < opts.d; ++i) {
      const bool predicted = fit.B.row(static_cast<Eigen::Index>(i)).norm() > 1e-6;
      if (predicted == static_cast<bool>(truth[i])) ++correct;
    }

    MtlRow row;
    row.p = p;
    row.secs = opts.suppress_times ? 0.0 : secs;
    row.iterations = fit.iterations;
    row.objective = fit.objective_trace.empty() ? kNan : fit.objective_trace.back();
    row.support_accuracy = static_cast<double>(correct) / static_cast<double>(opts.d);
    row.max_proj_iters = fit.max_projection_iterations;
    row.seed = opts.seed;
    rows.push_back(row);
  }
  return rows;
}

void write_mtl_csv(std::ostream& os, const std::vector<MtlRow>& rows) {
  os << "p,secs,iterations,objective,support_accuracy,max_proj_iters,seed\n";
  for (const MtlRow& r : rows) {
    os << format_real(r.p) << ',' << format_real(r.secs) << ',' << r.iterations << ','
       << format_real(r.objective) << ',' << format_real(r.support_accuracy) << ','
       << r.max_proj_iters << ',' << r.seed << '\n';
  }
}

}  // namespace lpball
