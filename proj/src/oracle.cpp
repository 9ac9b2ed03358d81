#include "lpball/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lpball/dual_objective.hpp"

namespace lpball {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section minimization of a unimodal function on [lo, hi].
template <typename F>
double golden_section(F f, double lo, double hi, double width) {
  double a = lo, b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Logarithm table for grid indices, rebuilt only when the grid size changes.
const std::vector<double>& log_table(std::int64_t n) {
  static std::vector<double> table;
  if (static_cast<std::int64_t>(table.size()) != n + 1) {
    table.resize(static_cast<std::size_t>(n + 1));
    table[0] = -std::numeric_limits<double>::infinity();
    for (std::int64_t j = 1; j <= n; ++j) table[static_cast<std::size_t>(j)] = std::log(static_cast<double>(j));
  }
  return table;
}

// Stationary root of x - y + mu*x^(p-1) on (lo, hi], found independently of
// the production solver: damped Newton with a hard bisection fallback
// whenever a candidate leaves the bracket.
double bracketed_root(double y, double mu, double p, double lo, double hi, double x0) {
  auto fp = [&](double x) { return x - y + mu * std::pow(x, p - 1.0); };
  double a = lo, b = hi;
  double x = std::clamp(x0, std::nextafter(a, b), b);
  for (int it = 0; it < 200; ++it) {
    const double r = fp(x);
    if (std::fabs(r) <= 1e-13 * (1.0 + y)) return x;
    if (r > 0.0) {
      b = x;
    } else {
      a = x;
    }
    const double deriv = 1.0 + mu * (p - 1.0) * std::pow(x, p - 2.0);
    double cand = deriv > 0.0 ? x - r / deriv : a;
    if (!(std::isfinite(cand) && cand > a && cand < b)) cand = 0.5 * (a + b);
    if (cand == x) cand = 0.5 * (a + b);
    if (b - a < 1e-300) return x;
    x = cand;
  }
  return x;
}

struct CoordinateCandidates {
  double values[2];
  int count;
};

// Stationary candidates of the scalar subproblem at weight mu: always 0 for
// p < 1, plus the interior root when one exists. The root from the previous
// (smaller) mu warm-starts the search.
CoordinateCandidates prox_candidates(double y, double mu, double p, double warm) {
  CoordinateCandidates c{{0.0, 0.0}, 0};
  if (mu == 0.0) {
    c.values[c.count++] = y;
    return c;
  }
  if (p >= 1.0) {
    double root;
    if (p == 1.0) {
      root = std::max(0.0, y - mu);
    } else if (p == 2.0) {
      root = y / (1.0 + mu);
    } else if (p > 1.0 && mu * std::pow(y, p - 1.0) < 1e-18 * (1.0 + y)) {
      root = y;
    } else {
      const double x0 = std::isfinite(warm) && warm > 0.0 ? warm : y;
      root = bracketed_root(y, mu, p, 0.0, y, x0);
    }
    c.values[c.count++] = root;
    return c;
  }
  c.values[c.count++] = 0.0;
  const double x_min = std::pow((1.0 - p) * mu, 1.0 / (2.0 - p));
  if (x_min < y && x_min - y + mu * std::pow(x_min, p - 1.0) < 0.0) {
    const double x0 = std::isfinite(warm) && warm > x_min ? warm : y;
    c.values[c.count++] = bracketed_root(y, mu, p, x_min, y, x0);
  }
  return c;
}

struct SweepBest {
  double obj = std::numeric_limits<double>::infinity();
  std::vector<double> point;
  double mu = 0.0;
};

// One pass over [mu_lo, mu_hi]: at each grid value enumerate every
// combination of per-coordinate candidates and keep the best feasible one.
void sweep_range(const std::vector<double>& y, double r, double p, double mu_lo, double mu_hi,
                 std::int64_t steps, SweepBest& best) {
  const std::size_t d = y.size();
  const double rp = std::pow(r, p);
  const double feas = rp * (1.0 + 1e-9 * p);  // ||x||_p <= r(1+1e-9) in p-th powers
  std::vector<double> warm(d, std::numeric_limits<double>::quiet_NaN());
  std::vector<CoordinateCandidates> cands(d);
  std::vector<double> powers[2];
  powers[0].resize(d);
  powers[1].resize(d);

  const double h = (mu_hi - mu_lo) / static_cast<double>(steps);
  for (std::int64_t s = 0; s <= steps; ++s) {
    const double mu = mu_lo + h * static_cast<double>(s);
    if (mu < 0.0) continue;
    int combos = 1;
    for (std::size_t i = 0; i < d; ++i) {
      cands[i] = prox_candidates(y[i], mu, p, warm[i]);
      const int last = cands[i].count - 1;
      if (cands[i].values[last] > 0.0) warm[i] = cands[i].values[last];
      for (int o = 0; o < cands[i].count; ++o) {
        powers[o][i] = std::pow(cands[i].values[o], p);
      }
      combos *= cands[i].count;
    }
    for (int mask = 0; mask < combos; ++mask) {
      int m = mask;
      double norm_pow = 0.0;
      double obj = 0.0;
      double x[3] = {0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < d; ++i) {
        const int pick = m % cands[i].count;
        m /= cands[i].count;
        x[i] = cands[i].values[pick];
        norm_pow += powers[pick][i];
        const double diff = y[i] - x[i];
        obj += 0.5 * diff * diff;
      }
      if (norm_pow <= feas && obj < best.obj) {
        best.obj = obj;
        best.mu = mu;
        best.point.assign(x, x + d);
      }
    }
  }
}

}  // namespace

OracleReport scalar_prox_oracle(double y, double mu, double p, std::int64_t grid_points) {
  if (!(y > 0.0) || !std::isfinite(y)) throw std::invalid_argument("scalar_prox_oracle: y must be > 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("scalar_prox_oracle: mu must be >= 0");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("scalar_prox_oracle: p must be > 0");
  grid_points = std::max<std::int64_t>(grid_points, 1'000'000);

  const double h = y / static_cast<double>(grid_points);
  const double log_h = std::log(h);
  const double scale = mu / p;
  const std::vector<double>& logs = log_table(grid_points);

  auto f = [&](double x) { return 0.5 * (x - y) * (x - y) + scale * std::pow(x, p); };

  double best_f = 0.5 * y * y;  // x = 0
  std::int64_t best_j = 0;
  for (std::int64_t j = 1; j <= grid_points; ++j) {
    const double x = h * static_cast<double>(j);
    const double quad = 0.5 * (x - y) * (x - y);
    if (quad >= best_f) continue;
    const double val = quad + scale * std::exp(p * (logs[static_cast<std::size_t>(j)] + log_h));
    if (val < best_f) {
      best_f = val;
      best_j = j;
    }
  }

  const double lo = h * static_cast<double>(std::max<std::int64_t>(best_j - 1, 0));
  const double hi = h * static_cast<double>(std::min<std::int64_t>(best_j + 1, grid_points));
  const double width = 1e-13;
  double x_star = golden_section(f, lo, hi, width);

  // Value search resolves the argmin only to the rounding plateau of f
  // (~sqrt(eps) around a quadratic minimum); when the cell brackets an
  // interior stationary point, sign bisection on the derivative pins it to
  // machine resolution.
  auto fprime = [&](double x) { return (x - y) + mu * std::pow(x, p - 1.0); };
  if (fprime(lo) <= 0.0 && fprime(hi) >= 0.0) {
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (fprime(m) <= 0.0 ? a : b) = m;
    }
    x_star = 0.5 * (a + b);
  }

  OracleReport report;
  report.best_point = {x_star};
  report.best_value = std::min(f(x_star), best_f);
  if (report.best_value >= 0.5 * y * y) {
    report.best_value = 0.5 * y * y;
    report.best_point = {0.0};
  }
  report.grid_resolution = grid_points;
  report.certified_tol = width;
  return report;
}

OracleReport projection_oracle(const std::vector<double>& y, double r, double p, std::int64_t mu_grid) {
  if (y.empty() || y.size() > 3) throw std::invalid_argument("projection_oracle: dimension must be 1..3");
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("projection_oracle: y must be > 0");
  if (!(r > 0.0)) throw std::invalid_argument("projection_oracle: r must be > 0");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("projection_oracle: p must be > 0");
  if (!(lp_norm(y, p) > r)) throw std::invalid_argument("projection_oracle: instance must be exterior");
  mu_grid = std::max<std::int64_t>(mu_grid, 100'000);

  // Dual bound on the working scale; the normalized bound transfers through
  // the prox scaling identity with the factor r^(2-p). Extend until the
  // all-coordinates prox at the right end is feasible.
  std::vector<double> y_scaled(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y_scaled[i] = y[i] / r;
  double bound = mu_upper_bound(y_scaled, p) * std::pow(r, 2.0 - p);
  const double rp = std::pow(r, p);
  for (int grow = 0; grow < 64; ++grow) {
    double norm_pow = 0.0;
    for (double yi : y) {
      CoordinateCandidates c = prox_candidates(yi, bound, p, std::numeric_limits<double>::quiet_NaN());
      double x_largest = c.values[c.count - 1];
      norm_pow += std::pow(x_largest, p);
    }
    if (norm_pow <= rp) break;
    bound *= 2.0;
  }

  SweepBest best;
  sweep_range(y, r, p, 0.0, bound, mu_grid, best);

  // Two local refinement rounds around the best cell.
  double cell = bound / static_cast<double>(mu_grid);
  for (int round = 0; round < 2; ++round) {
    const std::int64_t steps = 20'000;
    sweep_range(y, r, p, std::max(0.0, best.mu - 2.0 * cell), best.mu + 2.0 * cell, steps, best);
    cell = 4.0 * cell / static_cast<double>(steps);
  }

  OracleReport report;
  report.best_value = best.obj;
  report.best_point = best.point;
  report.grid_resolution = mu_grid;
  // Objective sensitivity to the dual grid: one cell of drift moves each
  // coordinate by at most |x'(mu)| ~ |x|^(p-1), bounded here by the ball radius.
  report.certified_tol = cell * static_cast<double>(y.size()) * std::max(1.0, std::pow(r, p - 1.0)) *
                             std::max(1.0, lp_norm(y, 2.0)) +
                         1e-12;
  return report;
}

OracleReport boundary_scan_2d(const std::vector<double>& y, double r, double p, std::int64_t grid_points) {
  if (y.size() != 2) throw std::invalid_argument("boundary_scan_2d: dimension must be 2");
  for (double v : y)
    if (!(v > 0.0)) throw std::invalid_argument("boundary_scan_2d: y must be > 0");
  if (!(lp_norm(y, p) > r)) throw std::invalid_argument("boundary_scan_2d: instance must be exterior");

  auto x2_of = [&](double x1) {
    const double t = std::pow(x1 / r, p);
    return t >= 1.0 ? 0.0 : r * std::pow(1.0 - t, 1.0 / p);
  };
  auto obj_of = [&](double x1) {
    const double d1 = y[0] - x1;
    const double d2 = y[1] - x2_of(x1);
    return 0.5 * (d1 * d1 + d2 * d2);
  };

  const double hi = std::min(y[0], r);
  const double h = hi / static_cast<double>(grid_points);
  double best_f = std::numeric_limits<double>::infinity();
  std::int64_t best_j = 0;
  for (std::int64_t j = 0; j <= grid_points; ++j) {
    const double f = obj_of(h * static_cast<double>(j));
    if (f < best_f) {
      best_f = f;
      best_j = j;
    }
  }
  const double lo = h * static_cast<double>(std::max<std::int64_t>(best_j - 1, 0));
  const double up = h * static_cast<double>(std::min<std::int64_t>(best_j + 1, grid_points));
  const double x1 = golden_section(obj_of, lo, up, 1e-13);

  OracleReport report;
  const double x1_best = obj_of(x1) < best_f ? x1 : h * static_cast<double>(best_j);
  report.best_point = {x1_best, x2_of(x1_best)};
  report.best_value = obj_of(x1_best);
  report.grid_resolution = grid_points;
  report.certified_tol = 1e-13;
  return report;
}

}  // namespace lpball
