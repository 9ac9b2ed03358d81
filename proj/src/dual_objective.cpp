#include "lpball/dual_objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lpball/scalar_prox.hpp"

namespace lpball {

namespace {
constexpr double kScaleThreshold = 1e10;

// mu * M^p without intermediate overflow of M^p.
double mu_times_pow(double mu, double m, double p) {
  if (mu == 0.0) return 0.0;
  const double direct = mu * std::pow(m, p);
  if (std::isfinite(direct)) return direct;
  return std::exp(std::log(mu) + p * std::log(m));
}
}  // namespace

double lp_norm(const std::vector<double>& v, double p) {
  double m = 0.0;
  for (double vi : v) m = std::max(m, std::fabs(vi));
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  double s = 0.0;
  for (double vi : v) s += std::pow(std::fabs(vi) / m, p);
  return m * std::pow(s, 1.0 / p);
}

DualEval eval_dual(const std::vector<double>& y_pos, double p, double mu) {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("eval_dual: p must be finite and > 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("eval_dual: mu must be finite and >= 0");

  DualEval ev;
  ev.mu = mu;
  ev.x_star.resize(y_pos.size());

  double sq_dist = 0.0;
  double x_max = 0.0;
  for (std::size_t i = 0; i < y_pos.size(); ++i) {
    ProxValue pv;
    try {
      pv = prox_scalar(y_pos[i], mu, p);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("eval_dual: prox failed at coordinate " + std::to_string(i) + ": " + e.what(),
                             e.last_iterate, e.last_residual);
    }
    const double x = std::fabs(pv.primary);
    ev.x_star[i] = x;
    if (pv.has_alternate) ev.jump_coords.push_back(i);
    const double d = y_pos[i] - x;
    sq_dist += d * d;
    x_max = std::max(x_max, x);
  }

  if (x_max == 0.0) {
    ev.g = 0.5 * sq_dist - mu / p;
    ev.g1 = -1.0 / p;
    ev.radius_p = 0.0;
    if (p > 1.0) {
      ev.g2 = 0.0;
      ev.newton_step = 0.0;
    }
    return ev;
  }

  const bool scaled = !(std::pow(x_max, p) <= kScaleThreshold);
  if (!scaled) {
    double sp = 0.0;
    for (double x : ev.x_star) sp += std::pow(x, p);
    ev.radius_p = std::pow(sp, 1.0 / p);
    ev.g1 = (sp - 1.0) / p;
    ev.g = 0.5 * sq_dist + (mu * sp - mu) / p;
    if (p > 1.0) {
      double t = 0.0;
      for (double x : ev.x_star)
        t += std::pow(x, 2.0 * p - 2.0) / (1.0 + mu * (p - 1.0) * std::pow(x, p - 2.0));
      ev.g2 = -t;
      ev.newton_step = t > 0.0 ? ev.g1 / t : std::numeric_limits<double>::infinity();
    }
    return ev;
  }

  // Scaled evaluation: powers of x/x_max stay in [0,1]; the Newton step is
  // assembled from the scaled sums so it remains finite even where the raw
  // derivatives do not.
  double s1 = 0.0;
  for (double x : ev.x_star) s1 += std::pow(x / x_max, p);
  ev.radius_p = x_max * std::pow(s1, 1.0 / p);
  ev.g1 = (std::pow(x_max, p) * s1 - 1.0) / p;
  ev.g = 0.5 * sq_dist + (mu_times_pow(mu, x_max, p) * s1 - mu) / p;
  if (p > 1.0) {
    double t = 0.0;
    for (double x : ev.x_star) {
      const double num = std::pow(x / x_max, 2.0 * p - 2.0);
      t += num / (1.0 + mu * (p - 1.0) * std::pow(x, p - 2.0));
    }
    ev.g2 = -std::pow(x_max, 2.0 * p - 2.0) * t;
    ev.newton_step =
        t > 0.0 ? (std::pow(x_max, 2.0 - p) * s1 - std::pow(x_max, 2.0 - 2.0 * p)) / (p * t)
                : std::numeric_limits<double>::infinity();
  }
  return ev;
}

double mu_upper_bound(const std::vector<double>& y_pos, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("mu_upper_bound: p must be > 0");
  if (p > 1.0 && std::isfinite(p)) return lp_norm(y_pos, p / (p - 1.0));
  return lp_norm(y_pos, std::numeric_limits<double>::infinity());
}

NormalizedInstance normalize(const std::vector<double>& y, double r, double p) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("normalize: r must be finite and > 0");
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("normalize: p must be finite and > 0");
  for (double yi : y)
    if (!std::isfinite(yi)) throw std::invalid_argument("normalize: y must be finite");

  NormalizedInstance inst;
  inst.dim = y.size();
  inst.r_original = r;
  inst.p = p;
  inst.zero_mask.assign(y.size(), 0);

  std::vector<std::size_t> idx;
  idx.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) {
      inst.zero_mask[i] = 1;
    } else {
      idx.push_back(i);
    }
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double fa = std::fabs(y[a]), fb = std::fabs(y[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  });

  inst.y_pos.reserve(idx.size());
  inst.signs.reserve(idx.size());
  inst.perm = idx;
  for (std::size_t i : idx) {
    inst.y_pos.push_back(std::fabs(y[i]) / r);
    inst.signs.push_back(y[i] < 0.0 ? -1.0 : 1.0);
  }
  inst.norm_p = lp_norm(inst.y_pos, p);
  inst.interior = inst.norm_p <= 1.0;
  return inst;
}

std::vector<double> denormalize(const NormalizedInstance& inst, const std::vector<double>& x_unit) {
  if (x_unit.size() != inst.y_pos.size())
    throw std::invalid_argument("denormalize: size mismatch");
  std::vector<double> x(inst.dim, 0.0);
  for (std::size_t k = 0; k < x_unit.size(); ++k) {
    x[inst.perm[k]] = inst.signs[k] * inst.r_original * x_unit[k];
  }
  return x;
}

}  // namespace lpball
