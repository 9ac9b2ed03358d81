#include "lpball/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lpball {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double lambda_max_power_iteration(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd G = A.transpose() * A;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(G.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const Eigen::VectorXd w = G * v;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::fabs(next - lambda) <= 1e-6 * next) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

PgdResult pgd(const LeastSquaresInstance& inst, const std::optional<Eigen::VectorXd>& truth,
              Eigen::VectorXd x0, int iters, double success_rel_tol,
              const SolverConfig& proj_config) {
  if (inst.A.rows() != inst.b.size()) throw std::invalid_argument("pgd: A and b disagree");
  if (!(inst.step > 0.0)) throw std::invalid_argument("pgd: step must be > 0");

  PgdResult res;
  Eigen::VectorXd x = x0.size() == 0 ? Eigen::VectorXd::Zero(inst.A.cols()) : x0;
  if (x.size() != inst.A.cols()) throw std::invalid_argument("pgd: x0 has wrong dimension");

  const double truth_norm = truth.has_value() ? truth->norm() : 0.0;
  res.residual_norms.reserve(static_cast<std::size_t>(iters));

  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd grad_step = x + inst.step * (inst.A.transpose() * (inst.b - inst.A * x));
    // An expansive step can blow up when the projection does not bound
    // magnitudes (the l0 ball below the phase transition); the trial is then a
    // plain recovery failure, not an error.
    if (!grad_step.allFinite()) {
      res.diverged = true;
      break;
    }
    ProjectionResult proj = project(to_std(grad_step), inst.radius, inst.p, proj_config);
    if (!proj.converged) ++res.projection_failures;
    x = to_eigen(proj.x_star);
    res.residual_norms.push_back((inst.b - inst.A * x).norm());
    if (truth.has_value() && truth_norm > 0.0) {
      res.relative_errors.push_back((x - *truth).norm() / truth_norm);
    }
  }

  res.x = x;
  res.success = !res.diverged && !res.relative_errors.empty() &&
                res.relative_errors.back() < success_rel_tol;
  return res;
}

ProxDualNorm prox_dual_norm(const Eigen::VectorXd& v, double weight, double p,
                            const SolverConfig& proj_config) {
  if (!(p >= 1.0)) throw std::invalid_argument("prox_dual_norm: requires p >= 1");
  if (!(weight > 0.0)) throw std::invalid_argument("prox_dual_norm: weight must be > 0");

  double q;
  if (p == 1.0) {
    q = std::numeric_limits<double>::infinity();
  } else if (std::isinf(p)) {
    q = 1.0;
  } else {
    q = p / (p - 1.0);
  }
  ProjectionResult proj = project(to_std(v), weight, q, proj_config);
  ProxDualNorm out;
  out.value = v - to_eigen(proj.x_star);
  out.projection_iterations = proj.iterations;
  out.converged = proj.converged;
  return out;
}

MtlResult mtl_prox_gradient(const MultiTaskInstance& inst, std::optional<Eigen::MatrixXd> B0,
                            double rel_tol, int max_iters, const SolverConfig& proj_config) {
  if (inst.A.rows() != inst.Y.rows()) throw std::invalid_argument("mtl: A and Y disagree");
  if (!(inst.tau >= 0.0)) throw std::invalid_argument("mtl: tau must be >= 0");
  if (!(inst.p > 1.0)) throw std::invalid_argument("mtl: requires p > 1");

  const Eigen::Index d = inst.A.cols();
  const Eigen::Index k = inst.Y.cols();
  Eigen::MatrixXd B = B0.has_value() ? *B0 : Eigen::MatrixXd::Zero(d, k);
  if (B.rows() != d || B.cols() != k) throw std::invalid_argument("mtl: B0 has wrong shape");

  MtlResult res;
  const double lambda = lambda_max_power_iteration(inst.A);
  if (!(lambda > 0.0)) throw std::invalid_argument("mtl: A'A has no positive spectrum");
  res.step = 0.999 * 0.5 / lambda;

  auto objective = [&](const Eigen::MatrixXd& M) {
    double penalty = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      penalty += lp_norm(to_std(M.row(i).transpose()), inst.p);
    }
    return 0.5 * (inst.A * M - inst.Y).squaredNorm() + inst.tau * penalty;
  };

  double f_prev = objective(B);
  res.objective_trace.push_back(f_prev);

  for (int it = 0; it < max_iters; ++it) {
    const Eigen::MatrixXd G = B - res.step * (inst.A.transpose() * (inst.A * B - inst.Y));
    if (inst.tau == 0.0) {
      B = G;
    } else {
      for (Eigen::Index i = 0; i < d; ++i) {
        ProxDualNorm row = prox_dual_norm(G.row(i).transpose(), res.step * inst.tau, inst.p, proj_config);
        res.max_projection_iterations = std::max(res.max_projection_iterations, row.projection_iterations);
        B.row(i) = row.value.transpose();
      }
    }
    const double f = objective(B);
    if (!std::isfinite(f)) throw std::runtime_error("mtl: objective diverged");
    res.objective_trace.push_back(f);
    ++res.iterations;
    if (std::fabs(f - f_prev) < rel_tol * (1.0 + std::fabs(f_prev))) {
      res.converged = true;
      f_prev = f;
      break;
    }
    f_prev = f;
  }

  res.B = B;
  return res;
}

}  // namespace lpball
