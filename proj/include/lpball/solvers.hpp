#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lpball/projector.hpp"

namespace lpball {

// min 0.5*||Ax - b||^2 over the lp ball of radius `radius`, solved by
// projected gradient with fixed step.
struct LeastSquaresInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double step = 0.0;
  double radius = 1.0;
  double p = 1.0;
};

struct PgdResult {
  Eigen::VectorXd x;
  std::vector<double> residual_norms;   // ||b - A x_k|| per iteration
  std::vector<double> relative_errors;  // ||x_k - truth|| / ||truth||, when truth given
  bool success = false;                 // final relative error below tolerance
  int projection_failures = 0;          // projections that exhausted their budget; run continues
  bool diverged = false;                // iterates left the representable range; trial cut short
};

PgdResult pgd(const LeastSquaresInstance& inst, const std::optional<Eigen::VectorXd>& truth,
              Eigen::VectorXd x0 = Eigen::VectorXd(), int iters = 500,
              double success_rel_tol = 1e-3, const SolverConfig& proj_config = {});

struct ProxDualNorm {
  Eigen::VectorXd value;
  int projection_iterations = 0;
  bool converged = true;
};

// prox of weight*||.||_p via the Moreau identity: v minus the projection of v
// onto the ball of the conjugate norm with radius weight. Requires p >= 1.
ProxDualNorm prox_dual_norm(const Eigen::VectorXd& v, double weight, double p,
                            const SolverConfig& proj_config = {});

// min 0.5*||AB - Y||_F^2 + tau * sum_i ||B_(i,.)||_p by proximal gradient
// with row-wise prox of the lp norm.
struct MultiTaskInstance {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Y;
  double tau = 1.0;
  double p = 2.0;
};

struct MtlResult {
  Eigen::MatrixXd B;
  std::vector<double> objective_trace;  // objective after each outer iteration
  int iterations = 0;
  bool converged = false;
  int max_projection_iterations = 0;    // worst inner projection across the run
  double step = 0.0;
};

// Step defaults to 0.999 * 0.5 / lambda_max(A'A), the largest eigenvalue
// estimated by power iteration to 1e-6 relative tolerance.
MtlResult mtl_prox_gradient(const MultiTaskInstance& inst,
                            std::optional<Eigen::MatrixXd> B0 = std::nullopt,
                            double rel_tol = 1e-3, int max_iters = 10000,
                            const SolverConfig& proj_config = {});

}  // namespace lpball
