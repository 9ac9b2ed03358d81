#pragma once

#include <stdexcept>
#include <string>

namespace lpball {

// Branch taken while evaluating the scalar prox. For p < 1 the operator is
// set-valued at one threshold point; Tie marks that case.
enum class ProxBranch { Zero, Interior, Tie, PassThrough, HardThresholdLimit };

// Result of prox_scalar. `primary` is the element of the prox set with the
// largest magnitude, sign-matched to the input. `alternate` is 0 and
// `has_alternate` true only when p < 1 and the input sits on the tie
// threshold where {0, primary} are both minimizers.
struct ProxValue {
  double primary = 0.0;
  double alternate = 0.0;
  bool has_alternate = false;
  ProxBranch branch = ProxBranch::Zero;
};

// Threshold constants of the p < 1 prox, all functions of p alone:
//   m_p  = (1-p)^{1/(2-p)}   location scale of the stationarity breakpoint
//   k_p  = [2(1-p)/p]^{1/(2-p)}  magnitude of the nonzero prox at the tie
//   r_p  = k_p + k_p^{p-1}       tie threshold on |y| at unit weight
struct ProxConstants {
  double m_p;
  double k_p;
  double r_p;
};

// Thrown when an iterative solve exhausts its iteration budget. Carries the
// last iterate and residual so callers can report partial progress.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double iterate, double residual)
      : std::runtime_error(what), last_iterate(iterate), last_residual(residual) {}
  double last_iterate;
  double last_residual;
};

ProxConstants prox_constants(double p);

// Positive root of x - y + mu*x^(p-1) = 0 for y > 0, mu >= 0, p > 0, p not in {1,2}.
// For p < 1 the caller must have established that a root beyond the
// stationarity breakpoint exists (sign test on the derivative minimum).
// Stops when |x - y + mu*x^(p-1)| <= tol_root*(1 + y).
double newton_root(double y, double mu, double p, double tol_root = 1e-14);

// Proximal operator of x -> (mu/p)*|x|^p at y, for any p > 0 and mu >= 0.
// Evaluates on |y| and restores the sign of y.
ProxValue prox_scalar(double y, double mu, double p);

}  // namespace lpball
