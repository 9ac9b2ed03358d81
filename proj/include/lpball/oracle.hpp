#pragma once

#include <cstdint>
#include <vector>

namespace lpball {

// Brute-force reference result. `certified_tol` is the width of the final
// search bracket around each reported coordinate; values are exact up to the
// curvature of the objective over that width.
struct OracleReport {
  double best_value = 0.0;
  std::vector<double> best_point;
  std::int64_t grid_resolution = 0;  // samples in the coarse scan
  double certified_tol = 0.0;
};

// Global minimum of 0.5*(x - y)^2 + (mu/p)*x^p over [0, y] by dense grid
// scan (at least `grid_points` samples) plus golden-section refinement of the
// best cell down to a bracket of width 1e-13.
OracleReport scalar_prox_oracle(double y, double mu, double p, std::int64_t grid_points = 1'000'000);

// Projection of y (all entries > 0, dimension <= 3, ||y||_p > r) onto the lp
// ball of radius r by sweeping the dual variable over a dense grid and
// enumerating every per-coordinate prox branch at each value, keeping the
// feasible candidate with the smallest distance. Two local refinement rounds
// tighten the sweep around the best cell.
OracleReport projection_oracle(const std::vector<double>& y, double r, double p,
                               std::int64_t mu_grid = 100'000);

// Independent primal check for d = 2: walk the ball boundary x2 = (r^p - x1^p)^(1/p)
// over a dense grid in x1 and refine the best cell by golden section.
OracleReport boundary_scan_2d(const std::vector<double>& y, double r, double p,
                              std::int64_t grid_points = 100'000);

}  // namespace lpball
