#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "lpball/dual_objective.hpp"

namespace lpball {

enum class Method { Auto, DualNewton, Bisection, ExactSpecial, NaiveBaseline };

struct SolverConfig {
  Method method = Method::Auto;
  double newton_obj_tol = 1e-12;       // relative stall tolerance on ||y - x_n||
  double bisect_mu_tol = 1e-12;        // absolute width target for the mu interval
  double bisect_radius_tol = 1e-7;     // relative radius agreement across the interval
  double armijo_alpha = 0.25;
  double armijo_beta = 0.5;
  int max_outer_iters = 5000;
  int max_backtracks_per_step = 60;
};

// Optimality measures, all computed on radius-normalized coordinates.
//   kkt1        aggregate stationarity residual of the scaled problem
//   kkt2        aggregate residual of the conjugate-norm form, p > 1 only
//   duality_gap f0(x*) - g(mu*); NaN when the multiplier estimate is negative
//   norm_ratio  ||x*||_p / r - 1
//   objective   ||y - x*||_2 after normalization
// Measures exceeding 1e10 are reported as +infinity.
struct Diagnostics {
  double kkt1 = 0.0;
  std::optional<double> kkt2;
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  double norm_ratio = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
};

struct ProjectionResult {
  std::vector<double> x_star;
  double mu_star = 0.0;   // multiplier on the normalized instance
  int iterations = 0;
  int backtracks_total = 0;
  Method method_used = Method::Auto;
  Diagnostics diagnostics;
  bool interior = false;
  bool converged = true;
};

// Outcome of a dual solve on a NormalizedInstance.
struct DualSolveResult {
  double mu_star = 0.0;
  std::vector<double> x_unit;
  int iterations = 0;
  int backtracks = 0;
  bool converged = true;
  bool fell_back_to_bisection = false;
  double mu_lo = 0.0;  // final bracket, equal to mu_star for the Newton path
  double mu_hi = 0.0;
};

// Projection of y onto the lp ball of radius r. p = 0 and p = infinity select
// the exact combinatorial and clamping routines; p in {1, 2} are exact as
// well. Method::Auto dispatches to dual Newton for p > 1 and bisection for
// p in (0, 1). Non-convergence is reported through the result flag, never
// silently.
ProjectionResult project(const std::vector<double>& y, double r, double p,
                         const SolverConfig& config = {});

// Damped Newton ascent on the dual; falls back to bisection when the
// curvature degenerates. Requires p > 1.
DualSolveResult dual_newton(const NormalizedInstance& inst, const SolverConfig& config = {});

// Bisection on the sign of the prox-path radius minus one. Works for every
// finite p > 0, including the set-valued regime p < 1.
DualSolveResult dual_bisection(const NormalizedInstance& inst, const SolverConfig& config = {});

// Closed-form projections for p in {0, 1, 2, infinity}.
ProjectionResult exact_special(const std::vector<double>& y, double r, double p);

// Nearest classical ball by exponent (l-inf above p=4, l2 down to 3/2, l1
// down to 1/2, l0 below), rescaled onto the target lp sphere.
ProjectionResult naive_baseline(const std::vector<double>& y, double r, double p);

// Optimality measures for a candidate x against y, both already normalized
// by the radius. When mu is absent it is estimated from the stationarity
// identity; a negative estimate marks the duality gap as NaN.
Diagnostics compute_diagnostics(const std::vector<double>& y_norm, const std::vector<double>& x_norm,
                                double p, std::optional<double> mu = std::nullopt);

}  // namespace lpball
