#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lpball/projector.hpp"

namespace lpball {

// One aggregated CSV row of the accuracy benchmark: means over `trials`
// independent instances for a (method, p) pair. All solution-quality
// measures are computed on radius-normalized coordinates; kkt2_or_gap
// holds the Fenchel-dual residual for p > 1 and the duality gap for
// p <= 1. pct_nan is meaningful for p < 1 only (NaN otherwise).
struct BenchRow {
  std::string method;
  double p = 0.0;
  double iters = 0.0;
  double secs = 0.0;
  double kkt1 = 0.0;
  double kkt2_or_gap = 0.0;
  double obj = 0.0;
  double ratio = 0.0;
  double pct_nan = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

// Raw per-trial measurements backing one BenchRow, kept so callers can
// aggregate differently (e.g. mean absolute ratio).
struct TrialMetrics {
  double iters = 0.0;
  double secs = 0.0;
  double kkt1 = 0.0;
  double kkt2_or_gap = 0.0;  // NaN when the gap is undefined for this trial
  double obj = 0.0;
  double ratio = 0.0;
};

struct BenchOptions {
  std::size_t d = 10000;
  std::vector<double> p_list;
  int trials = 20;
  std::uint64_t seed = 0;
  bool suppress_times = false;  // write secs as 0 for byte-identical output
  int threads = 0;              // 0 -> hardware concurrency
  SolverConfig config;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<std::vector<TrialMetrics>> trial_data;  // parallel to rows, trial order
  std::vector<double> measured_secs;                  // mean wall time per row, always real
};

// For every p: draws y with standard-normal entries and r uniform in
// (0, ||y||_p) per trial, runs each applicable method (naive always,
// dual Newton for p > 1, bisection always) on the same instances, and
// averages the diagnostics. Trial t of the i-th p uses the PRNG
// substream (seed, i*trials + t), so results do not depend on the
// worker schedule.
BenchResult run_bench(const BenchOptions& opts);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

// One cell of the compressed-sensing phase diagram.
struct PhaseCell {
  int m = 0;
  int sparsity = 0;
  double p = 0.0;
  double success_rate = 0.0;
  int trials = 0;
};

struct PhaseOptions {
  std::size_t d = 256;
  std::vector<int> s_list = {10};
  std::vector<int> m_list = {16, 32, 64, 128, 256};
  std::vector<double> p_list = {0.0, 0.5, 1.0};
  int trials = 20;
  int iters = 500;
  std::uint64_t seed = 0;
  int threads = 0;
  SolverConfig config;
};

// For each (p, s, m, trial): support drawn uniformly, signal and sensing
// matrix standard normal, noiseless b = As, radius ||s||_p (the integer s
// for p = 0); PGD with step 1/m from zero; success when the relative
// error against the true signal ends below 1e-3.
std::vector<PhaseCell> run_cs_phase(const PhaseOptions& opts);
void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells);

struct MtlRow {
  double p = 0.0;
  double secs = 0.0;
  int iterations = 0;
  double objective = 0.0;
  double support_accuracy = 0.0;      // fraction of rows classified correctly
  int max_proj_iters = 0;
  std::uint64_t seed = 0;
};

struct MtlOptions {
  std::size_t d = 100;
  std::size_t k = 10;
  std::size_t m = 200;
  std::vector<double> p_list = {1.5, 3.0, 8.0};
  double tau = -1.0;  // < 0 -> 0.01 * d * p
  double rel_tol = 1e-3;
  int max_iters = 10000;
  std::uint64_t seed = 0;
  bool suppress_times = false;
  // The regression driver solves its projections to 1e-6, not machine
  // precision: accuracy beyond the outer tolerance buys nothing.
  SolverConfig config = [] {
    SolverConfig c;
    c.newton_obj_tol = 1e-6;
    return c;
  }();
};

// Row-sparse multi-task regression: A has normal(2,1) entries, the true
// coefficient matrix has 10 standard-normal nonzero rows, Y = A B* + noise
// (sd 0.1); proximal gradient starts from B* plus standard-normal noise.
// Support classification thresholds row norms at 1e-6.
std::vector<MtlRow> run_mtl(const MtlOptions& opts);
void write_mtl_csv(std::ostream& os, const std::vector<MtlRow>& rows);

// 17 significant digits; magnitudes above 1e10 become "inf"/"-inf" and
// NaN becomes "nan", matching the benchmark's reporting convention.
std::string format_real(double v);

}  // namespace lpball
