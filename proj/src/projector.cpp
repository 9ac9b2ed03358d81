#include "lpball/projector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lpball/scalar_prox.hpp"

namespace lpball {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMeasureCap = 1e10;

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

double capped(double v) { return v > kMeasureCap ? kInf : v; }

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void check_vector(const std::vector<double>& y) {
  if (y.empty()) throw std::invalid_argument("project: y must be nonempty");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("project: y must be finite");
}

std::vector<double> scale_vector(const std::vector<double>& v, double factor) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
  return out;
}

// Indices of the k largest magnitudes, earlier index winning ties.
std::vector<std::size_t> top_k_indices(const std::vector<double>& y, std::size_t k) {
  std::vector<std::size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double fa = std::fabs(y[a]), fb = std::fabs(y[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

std::size_t count_nonzero(const std::vector<double>& v) {
  std::size_t n = 0;
  for (double x : v)
    if (x != 0.0) ++n;
  return n;
}

}  // namespace

DualSolveResult dual_newton(const NormalizedInstance& inst, const SolverConfig& config) {
  if (!(inst.p > 1.0)) throw std::invalid_argument("dual_newton: requires p > 1");

  const std::vector<double>& y = inst.y_pos;
  const double p = inst.p;
  DualSolveResult res;

  // Sign bracket on g': the root lies in (lo, hi) since g'(0) > 0 for an
  // exterior instance and the radius at the upper bound is already inside.
  double lo = 0.0;
  double hi = mu_upper_bound(y, p);
  double mu = 0.5 * hi;
  DualEval ev = eval_dual(y, p, mu);

  double obj_prev = kNaN;
  bool have_prev = false;
  res.converged = false;

  for (int outer = 0; outer < config.max_outer_iters; ++outer) {
    const double obj = l2_distance(y, ev.x_star);
    if (have_prev && std::fabs(obj - obj_prev) < config.newton_obj_tol * (1.0 + obj_prev)) {
      res.converged = true;
      break;
    }
    obj_prev = obj;
    have_prev = true;

    // Concavity can degrade numerically (all coordinates flat); the ascent
    // direction is then meaningless and bisection takes over.
    if (!ev.g2.has_value() || !(*ev.g2 < 0.0) || !std::isfinite(ev.g) || !std::isfinite(ev.g1)) {
      DualSolveResult fb = dual_bisection(inst, config);
      fb.fell_back_to_bisection = true;
      fb.backtracks += res.backtracks;
      return fb;
    }

    if (ev.g1 > 0.0) {
      lo = mu;
    } else {
      hi = mu;
    }

    const double dmu = ev.newton_step;
    if (dmu == 0.0) {
      res.converged = true;
      break;
    }

    // An out-of-bracket raw step is replaced by the farther-reaching of two
    // safeguards: the tail model mu * r(mu)^(p-1) (from r(mu)^p ~
    // mu^(-p/(p-1)) when every coordinate sits in its power regime), which
    // crosses a flat tail in one jump, and the bracket midpoint, which
    // beats the tail's few-percent decrements when r(mu) is near 1.
    double proposal = mu + dmu;
    if (!(std::isfinite(proposal) && proposal > lo && proposal < hi)) {
      const double tail = ev.radius_p > 0.0 ? mu * std::pow(ev.radius_p, p - 1.0) : kNaN;
      proposal = 0.5 * (lo + hi);
      if (std::isfinite(tail) && tail > lo && tail < hi &&
          std::fabs(tail - mu) > std::fabs(proposal - mu)) {
        proposal = tail;
      }
      if (proposal == mu) {
        res.converged = true;
        break;
      }
    }
    const double dir = proposal - mu;

    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks_per_step; ++bt) {
      const double cand = mu + t * dir;
      DualEval ev_c = eval_dual(y, p, cand);
      // The sufficient-increase test carries an absolute rounding allowance:
      // near the maximizer the true gain per step sinks below one ulp of g,
      // and an incumbent that happened to round up would otherwise reject
      // every neighbor until the step underflows.
      if (std::isfinite(ev_c.g) &&
          ev_c.g >= ev.g + config.armijo_alpha * ev.g1 * (cand - mu) -
                        4.0 * kEps * (1.0 + std::fabs(ev.g))) {
        mu = cand;
        ev = std::move(ev_c);
        accepted = true;
        break;
      }
      t *= config.armijo_beta;
      ++res.backtracks;
    }
    if (!accepted) {
      // The rounding allowance above absorbs noise-level rejections, so
      // exhausting the backtracks means the dual evaluation itself misbehaved
      // (e.g. went non-finite); bisection is immune to that.
      DualSolveResult fb = dual_bisection(inst, config);
      fb.fell_back_to_bisection = true;
      fb.backtracks += res.backtracks;
      return fb;
    }
    ++res.iterations;
  }

  res.mu_star = mu;
  res.mu_lo = mu;
  res.mu_hi = mu;
  res.x_unit = std::move(ev.x_star);
  return res;
}

DualSolveResult dual_bisection(const NormalizedInstance& inst, const SolverConfig& config) {
  const std::vector<double>& y = inst.y_pos;
  const double p = inst.p;

  DualSolveResult res;
  double bound = mu_upper_bound(y, p);

  double radius_left = inst.norm_p > 0.0 ? inst.norm_p : lp_norm(y, p);  // radius at mu = 0
  double radius_right = eval_dual(y, p, bound).radius_p;
  // With p < 1 a dominant coordinate can keep its nonzero prox branch beyond
  // the sup-norm bound; extend until the right end is feasible.
  for (int grow = 0; grow < 64 && radius_right > 1.0; ++grow) {
    bound *= 2.0;
    radius_right = eval_dual(y, p, bound).radius_p;
  }

  double mu_left = 0.0;
  double mu_right = bound;
  // Enough halvings to pin the root to machine width even when it sits many
  // orders of magnitude below the initial bound.
  constexpr int kMaxBisectIters = 160;

  res.converged = false;
  bool at_machine_width = false;
  for (int iter = 0; iter < kMaxBisectIters; ++iter) {
    const double mu_mid = 0.5 * (mu_left + mu_right);
    if (mu_mid == mu_left || mu_mid == mu_right) {
      at_machine_width = true;
      break;
    }
    const double radius_mid = eval_dual(y, p, mu_mid).radius_p;
    ++res.iterations;
    if ((radius_left - 1.0) * (radius_mid - 1.0) < 0.0) {
      mu_right = mu_mid;
      radius_right = radius_mid;
    } else {
      mu_left = mu_mid;
      radius_left = radius_mid;
    }
    const bool span_ok =
        radius_left - radius_right < config.bisect_radius_tol * (1.0 + radius_left);
    at_machine_width = mu_right - mu_left < kEps * mu_right;
    if ((mu_right - mu_left < config.bisect_mu_tol && span_ok) || at_machine_width) {
      // The radius span certifies a boundary point; a machine-width interval
      // with a large span means the target radius falls inside a jump of
      // r(mu), which only the flag can report.
      res.converged = span_ok;
      break;
    }
  }

  const double mu_mid = 0.5 * (mu_left + mu_right);
  // On a jump landing the midpoint rounds to an arbitrary side of the
  // discontinuity; the max-radius selection is the left endpoint's prox,
  // whose objective never exceeds the exact projection's.
  DualEval ev = res.converged ? eval_dual(y, p, mu_mid) : eval_dual(y, p, mu_left);
  res.mu_star = mu_mid;
  res.mu_lo = mu_left;
  res.mu_hi = mu_right;
  res.x_unit = std::move(ev.x_star);
  return res;
}

ProjectionResult exact_special(const std::vector<double>& y, double r, double p) {
  check_vector(y);
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("exact_special: r must be finite and > 0");

  ProjectionResult res;
  res.method_used = Method::ExactSpecial;
  res.iterations = 1;
  res.mu_star = 0.0;

  if (p == 2.0) {
    const double n = lp_norm(y, 2.0);
    if (n <= r) {
      res.x_star = y;
      res.interior = true;
      return res;
    }
    res.x_star = scale_vector(y, r / n);
    res.mu_star = n / r - 1.0;
    return res;
  }

  if (std::isinf(p)) {
    res.interior = true;
    res.x_star.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      res.x_star[i] = std::clamp(y[i], -r, r);
      if (res.x_star[i] != y[i]) res.interior = false;
    }
    res.mu_star = kNaN;
    return res;
  }

  if (p == 1.0) {
    const double n1 = lp_norm(y, 1.0);
    if (n1 <= r) {
      res.x_star = y;
      res.interior = true;
      return res;
    }
    // Sort-based simplex projection: the threshold is the largest partial
    // average of the sorted magnitudes exceeding its own order statistic.
    std::vector<double> u(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) u[i] = std::fabs(y[i]);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double lambda = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      cumsum += u[j];
      const double cand = (cumsum - r) / static_cast<double>(j + 1);
      if (u[j] > cand) lambda = cand;
    }
    res.x_star.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double m = std::fabs(y[i]) - lambda;
      res.x_star[i] = m > 0.0 ? sign_of(y[i]) * m : 0.0;
    }
    res.mu_star = lambda / r;
    return res;
  }

  if (p == 0.0) {
    if (r < 1.0) throw std::invalid_argument("exact_special: p = 0 requires r >= 1");
    const auto k = static_cast<std::size_t>(std::floor(r));
    if (count_nonzero(y) <= k) {
      res.x_star = y;
      res.interior = true;
      res.mu_star = kNaN;
      return res;
    }
    res.x_star.assign(y.size(), 0.0);
    for (std::size_t i : top_k_indices(y, k)) res.x_star[i] = y[i];
    res.mu_star = kNaN;
    return res;
  }

  throw std::invalid_argument("exact_special: p must be one of {0, 1, 2, infinity}");
}

ProjectionResult naive_baseline(const std::vector<double>& y, double r, double p) {
  check_vector(y);
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("naive_baseline: r must be finite and > 0");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("naive_baseline: p must be finite and > 0");

  ProjectionResult res;
  res.method_used = Method::NaiveBaseline;
  res.iterations = 1;
  res.mu_star = kNaN;

  if (lp_norm(y, p) <= r) {
    res.x_star = y;
    res.interior = true;
    return res;
  }

  ProjectionResult base;
  if (p > 4.0) {
    base = exact_special(y, r, kInf);
  } else if (p > 1.5) {
    base = exact_special(y, r, 2.0);
  } else if (p > 0.5) {
    base = exact_special(y, r, 1.0);
  } else {
    const double k_real = std::floor(std::pow(r, p));
    const auto k = static_cast<std::size_t>(std::clamp(k_real, 1.0, static_cast<double>(y.size())));
    base = exact_special(y, static_cast<double>(k), 0.0);
  }

  const double n = lp_norm(base.x_star, p);
  res.x_star = scale_vector(base.x_star, r / n);
  return res;
}

Diagnostics compute_diagnostics(const std::vector<double>& y_norm, const std::vector<double>& x_norm,
                                double p, std::optional<double> mu_opt) {
  if (y_norm.size() != x_norm.size()) throw std::invalid_argument("compute_diagnostics: size mismatch");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("compute_diagnostics: p must be finite and > 0");

  Diagnostics diag;
  diag.objective = l2_distance(y_norm, x_norm);
  diag.norm_ratio = lp_norm(x_norm, p) - 1.0;

  double mu;
  if (mu_opt.has_value()) {
    mu = *mu_opt;
  } else {
    // Stationarity aggregated over nonzero coordinates gives
    // mu = (y'x - x'x) / ||x||_p^p; the estimate may come out negative for
    // candidates far from optimal, which poisons the gap but not kkt1.
    double num = 0.0;
    for (std::size_t i = 0; i < x_norm.size(); ++i) num += x_norm[i] * (y_norm[i] - x_norm[i]);
    const double norm_x = lp_norm(x_norm, p);
    const double den = norm_x > 0.0 ? std::pow(norm_x, p) : 0.0;
    mu = den > 0.0 ? num / den : 0.0;
  }

  double kkt1 = 0.0;
  for (std::size_t i = 0; i < y_norm.size(); ++i) {
    const double ax = std::fabs(x_norm[i]);
    double term;
    if (mu == 0.0) {
      term = std::fabs(x_norm[i] - y_norm[i]);
    } else {
      // Below 1e-12 the power |x|^(p-1) is replaced by |y/mu|, the value
      // stationarity dictates; this keeps correctly-zeroed coordinates from
      // flooding the residual.
      const double w = ax >= 1e-12 ? std::pow(ax, p - 1.0) : std::fabs(y_norm[i] / mu);
      term = std::fabs(x_norm[i] - y_norm[i] + mu * w * sign_of(y_norm[i]));
    }
    kkt1 += term;
  }
  diag.kkt1 = capped(kkt1);

  if (p > 1.0) {
    const double q = p / (p - 1.0);
    std::vector<double> z(y_norm.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = y_norm[i] - x_norm[i];
    const double nq = lp_norm(z, q);
    double kkt2 = 0.0;
    if (nq > 0.0) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double az = std::fabs(z[i]);
        const double w = az >= 1e-12 ? std::pow(az / nq, q - 1.0) : std::fabs(x_norm[i]);
        kkt2 += std::fabs(z[i] - y_norm[i] + w * sign_of(y_norm[i]));
      }
    }
    diag.kkt2 = capped(kkt2);
  }

  if (mu < 0.0 || !std::isfinite(mu)) {
    diag.duality_gap = kNaN;
  } else {
    std::vector<double> y_pos;
    y_pos.reserve(y_norm.size());
    for (double v : y_norm)
      if (v != 0.0) y_pos.push_back(std::fabs(v));
    const double g = y_pos.empty() ? -mu / p : eval_dual(y_pos, p, mu).g;
    const double f0 = 0.5 * diag.objective * diag.objective;
    diag.duality_gap = capped(f0 - g);
  }
  return diag;
}

ProjectionResult project(const std::vector<double>& y, double r, double p, const SolverConfig& config) {
  check_vector(y);
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("project: r must be finite and > 0");
  if (std::isnan(p) || p < 0.0) throw std::invalid_argument("project: p must be >= 0");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const bool special = (p == 0.0) || (p == 1.0) || (p == 2.0) || std::isinf(p);

  Method method = config.method;
  if (method == Method::Auto) {
    method = special ? Method::ExactSpecial : (p > 1.0 ? Method::DualNewton : Method::Bisection);
  }

  switch (method) {
    case Method::ExactSpecial:
      if (!special) throw std::invalid_argument("project: exact method requires p in {0, 1, 2, infinity}");
      break;
    case Method::DualNewton:
      if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("project: dual Newton requires finite p > 1");
      break;
    case Method::Bisection:
      if (!(p > 0.0) || std::isinf(p)) throw std::invalid_argument("project: bisection requires finite p > 0");
      break;
    case Method::NaiveBaseline:
      if (!(p > 0.0) || std::isinf(p)) throw std::invalid_argument("project: naive baseline requires finite p > 0");
      break;
    case Method::Auto:
      break;
  }

  // The exact routines for p = 0 and p = infinity work on raw coordinates;
  // their optimality measures reduce to the feasibility ratio.
  if (p == 0.0 || std::isinf(p)) {
    ProjectionResult res = exact_special(y, r, p);
    res.diagnostics.objective = l2_distance(y, res.x_star) / r;
    if (p == 0.0) {
      res.diagnostics.norm_ratio =
          static_cast<double>(count_nonzero(res.x_star)) / std::floor(r) - 1.0;
    } else {
      res.diagnostics.norm_ratio = lp_norm(res.x_star, p) / r - 1.0;
    }
    res.diagnostics.seconds = elapsed();
    return res;
  }

  NormalizedInstance inst = normalize(y, r, p);
  const std::vector<double> y_scaled = scale_vector(y, 1.0 / r);

  if (inst.interior) {
    ProjectionResult res;
    res.x_star = y;
    res.mu_star = 0.0;
    res.method_used = method;
    res.interior = true;
    res.diagnostics = compute_diagnostics(y_scaled, y_scaled, p, 0.0);
    res.diagnostics.seconds = elapsed();
    return res;
  }

  ProjectionResult res;
  if (method == Method::ExactSpecial || method == Method::NaiveBaseline) {
    res = method == Method::ExactSpecial ? exact_special(y, r, p) : naive_baseline(y, r, p);
    const std::optional<double> mu =
        (method == Method::ExactSpecial && std::isfinite(res.mu_star))
            ? std::optional<double>(res.mu_star)
            : std::nullopt;
    res.diagnostics = compute_diagnostics(y_scaled, scale_vector(res.x_star, 1.0 / r), p, mu);
  } else {
    DualSolveResult sol =
        method == Method::DualNewton ? dual_newton(inst, config) : dual_bisection(inst, config);
    res.x_star = denormalize(inst, sol.x_unit);
    res.mu_star = sol.mu_star;
    res.iterations = sol.iterations;
    res.backtracks_total = sol.backtracks;
    res.converged = sol.converged;
    res.method_used = sol.fell_back_to_bisection ? Method::Bisection : method;
    res.diagnostics = compute_diagnostics(y_scaled, scale_vector(res.x_star, 1.0 / r), p, sol.mu_star);
  }
  res.diagnostics.seconds = elapsed();
  return res;
}

}  // namespace lpball
