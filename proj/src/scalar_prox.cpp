#include "lpball/scalar_prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpball {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxNewtonIters = 100;

double sign_of(double y) { return y < 0.0 ? -1.0 : 1.0; }

void check_domain(double y, double mu, double p) {
  if (!std::isfinite(y)) throw std::invalid_argument("prox: y must be finite");
  if (!std::isfinite(mu) || mu < 0.0) throw std::invalid_argument("prox: mu must be finite and >= 0");
  if (!std::isfinite(p) || p <= 0.0) throw std::invalid_argument("prox: p must be finite and > 0");
}

// Safeguarded Newton on the stationarity residual x - y + mu*x^(p-1).
// The residual is increasing on the bracket, so any candidate that leaves
// (lo, hi) is replaced by the midpoint. `x0` overrides the standard initial
// point when the caller already has a nearby estimate.
double newton_root_impl(double y, double mu, double p, double tol_root, double x0) {
  const double tol = tol_root * (1.0 + y);

  // For p < 1 the residual decreases until the breakpoint below; the root
  // sought lies to its right, so the bracket starts there.
  double lo = 0.0;
  if (p < 1.0) lo = std::pow((1.0 - p) * mu, 1.0 / (2.0 - p));
  double hi = std::max(y, x0);

  double x = x0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0; iter < kMaxNewtonIters; ++iter) {
    residual = x - y + mu * std::pow(x, p - 1.0);
    if (std::isfinite(residual) && std::fabs(residual) <= tol) return x;

    if (residual > 0.0) {
      hi = x;
    } else {
      lo = std::max(lo, x);
    }
    // The residual slope can reach 1/eps near p = 1 (conjugate exponents) or
    // for huge mu, leaving the residual target unattainable in doubles; a
    // machine-width bracket already pins the root to full precision.
    if (hi - lo <= kEps * (1.0 + hi)) return 0.5 * (lo + hi);

    double candidate;
    if (x > 1.0 || p < 1.0) {
      const double v = std::pow(x, p - 2.0);
      candidate = (y / v + mu * (p - 2.0) * x) / (1.0 / v + mu * (p - 1.0));
    } else {
      const double w = std::pow(x, p - 2.0);
      candidate = (y + mu * (p - 2.0) * x * w) / (1.0 + mu * (p - 1.0) * w);
    }
    if (std::isfinite(candidate) && candidate > lo && candidate < hi) {
      // One-sided stall: the iterate stops moving at machine resolution
      // before the residual target is met (slope >> 1/tol).
      if (std::fabs(candidate - x) <= kEps * (1.0 + std::fabs(x))) return candidate;
    } else {
      candidate = 0.5 * (lo + hi);
    }
    x = candidate;
  }
  throw ConvergenceError("newton_root: iteration cap exceeded", x, residual);
}

double default_initial_point(double y, double mu, double p) {
  const double den = 1.0 + mu * (p - 1.0);
  double x0 = y;
  if (den > 0.0) {
    x0 = std::max(1.0, std::min(y, (y + mu * (p - 2.0)) / den));
  }
  if (p > 2.0 && mu > 0.0) {
    // When mu*x^(p-2) >> 1 the root sits near (y/mu)^(1/(p-1)); without this
    // start Newton contracts only by (p-2)/(p-1) per step. Log form avoids
    // overflow in the quotient for extreme mu.
    const double x_pow = std::exp((std::log(y) - std::log(mu)) / (p - 1.0));
    if (std::isfinite(x_pow) && x_pow > 0.0) x0 = std::min(x0, x_pow);
  }
  if (!(std::isfinite(x0) && x0 > 0.0)) x0 = y;
  if (p < 1.0) {
    // Starting points at or below the derivative minimum sit on the wrong
    // curvature side; y is always a valid start for the rightmost root.
    const double x_min = std::pow((1.0 - p) * mu, 1.0 / (2.0 - p));
    if (x0 <= x_min) x0 = y;
  }
  return x0;
}

ProxValue signed_value(double s, double x, ProxBranch branch) {
  ProxValue v;
  v.primary = s * x;
  v.branch = branch;
  return v;
}

}  // namespace

ProxConstants prox_constants(double p) {
  if (!std::isfinite(p) || p <= 0.0 || p >= 1.0)
    throw std::invalid_argument("prox_constants: p must be in (0,1)");
  ProxConstants c;
  const double e = 1.0 / (2.0 - p);
  c.m_p = std::pow(1.0 - p, e);
  c.k_p = std::pow(2.0 * (1.0 - p) / p, e);
  c.r_p = c.k_p + std::pow(c.k_p, p - 1.0);
  return c;
}

double newton_root(double y, double mu, double p, double tol_root) {
  check_domain(y, mu, p);
  if (y <= 0.0) throw std::invalid_argument("newton_root: y must be > 0");
  if (p == 1.0 || p == 2.0) throw std::invalid_argument("newton_root: p must not be 1 or 2");
  if (mu == 0.0) return y;
  if (mu * std::pow(y, p - 1.0) < kEps) return y;
  return newton_root_impl(y, mu, p, tol_root, default_initial_point(y, mu, p));
}

ProxValue prox_scalar(double y, double mu, double p) {
  check_domain(y, mu, p);
  const double a = std::fabs(y);
  const double s = sign_of(y);

  if (a == 0.0) return signed_value(s, 0.0, ProxBranch::Zero);
  if (mu == 0.0) return signed_value(s, a, ProxBranch::PassThrough);

  if (p == 2.0) return signed_value(s, a / (1.0 + mu), ProxBranch::Interior);
  if (p == 1.0) {
    if (a <= mu) return signed_value(s, 0.0, ProxBranch::Zero);
    return signed_value(s, a - mu, ProxBranch::Interior);
  }

  if (p > 1.0) {
    if (mu * std::pow(a, p - 1.0) < kEps) return signed_value(s, a, ProxBranch::PassThrough);

    if (p > 2.0) {
      const double x = newton_root(a, mu, p);
      return signed_value(s, x, x == a ? ProxBranch::PassThrough : ProxBranch::Interior);
    }

    // 1 < p < 2: solve through the conjugate exponent q > 2, where the
    // Newton iteration is globally well behaved, then map back.
    const double ratio = a / mu;
    if (!std::isfinite(ratio)) return signed_value(s, a, ProxBranch::PassThrough);

    // The conjugate root collapses onto its input when the prox is tiny;
    // the stationarity relation |x|^(p-1) = y/mu then gives x directly.
    const double safe_x = std::pow(ratio, 1.0 / (p - 1.0));
    if (safe_x / mu < kEps * a) {
      return signed_value(s, safe_x, safe_x > 0.0 ? ProxBranch::Interior : ProxBranch::Zero);
    }

    const double q = p / (p - 1.0);
    const double z = newton_root(ratio, 1.0 / mu, q);
    double x = a - mu * z;
    if (!(x > 0.0)) return signed_value(s, 0.0, ProxBranch::Zero);
    // The subtraction loses relative accuracy when mu*z is close to a;
    // a few Newton steps on the original residual restore it.
    x = newton_root_impl(a, mu, p, 1e-14, std::min(x, a));
    return signed_value(s, x, ProxBranch::Interior);
  }

  // 0 < p < 1. Near the p -> 0 limit the tie constants collapse onto the
  // hard threshold at sqrt(2*mu/p); switch over once they are within
  // rounding of it.
  const ProxConstants c = prox_constants(p);
  if (std::fabs(c.k_p / std::sqrt(2.0 / p) - 1.0) <= 4.0 * kEps) {
    const double thr = std::sqrt(2.0 * mu / p);
    if (a < thr) return signed_value(s, 0.0, ProxBranch::HardThresholdLimit);
    ProxValue v = signed_value(s, a, ProxBranch::HardThresholdLimit);
    if (a == thr) {
      v.alternate = 0.0;
      v.has_alternate = true;
    }
    return v;
  }

  // The residual attains its minimum at x_min; a nonnegative value there
  // means no stationary point beats 0.
  const double x_min = std::pow((1.0 - p) * mu, 1.0 / (2.0 - p));
  const double d_min = x_min - a + mu * std::pow(x_min, p - 1.0);
  if (d_min >= 0.0) return signed_value(s, 0.0, ProxBranch::Zero);

  const double z = newton_root(a, mu, p);
  const double f_z = 0.5 * (z - a) * (z - a) + (mu / p) * std::pow(z, p);
  const double f_0 = 0.5 * a * a;
  const double tie_tol = 1e-12;
  if (std::fabs(f_z - f_0) <= tie_tol * (1.0 + f_0)) {
    ProxValue v = signed_value(s, z, ProxBranch::Tie);
    v.alternate = 0.0;
    v.has_alternate = true;
    return v;
  }
  if (f_z < f_0) return signed_value(s, z, ProxBranch::Interior);
  return signed_value(s, 0.0, ProxBranch::Zero);
}

}  // namespace lpball
