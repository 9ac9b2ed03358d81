#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace lpball {

// Exterior instance reduced to canonical form: signs stripped, zeros removed,
// coordinates divided by the radius and sorted descending. Sorting fixes the
// reduction order of every sum downstream, so results are invariant to input
// permutation bit for bit.
struct NormalizedInstance {
  std::vector<double> y_pos;              // |y_i|/r, descending, zeros removed
  std::vector<double> signs;              // sign of the source coordinate, aligned with y_pos
  std::vector<std::size_t> perm;          // source index per entry of y_pos
  std::vector<unsigned char> zero_mask;   // 1 where the source coordinate was 0
  std::size_t dim = 0;                    // source dimension
  double r_original = 1.0;
  double p = 2.0;
  double norm_p = 0.0;                    // ||y_pos||_p
  bool interior = false;                  // ||y||_p <= r, nothing to solve
};

// One evaluation of the dual function at mu >= 0.
//   g        dual objective value
//   g1       first derivative, (||x*(mu)||_p^p - 1)/p
//   g2       second derivative, present for p > 1 only
//   x_star   max-magnitude prox per coordinate (aligned with the input)
//   radius_p ||x_star||_p
//   jump_coords  coordinates whose prox was two-valued (p < 1 tie points)
//   newton_step  -g1/g2 evaluated in scaled form; finite even when the raw
//                derivatives overflow, meaningful only when g2 is present
struct DualEval {
  double mu = 0.0;
  double g = 0.0;
  double g1 = 0.0;
  std::optional<double> g2;
  std::vector<double> x_star;
  double radius_p = 0.0;
  std::vector<std::size_t> jump_coords;
  double newton_step = 0.0;
};

// ||v||_p computed against the largest magnitude so intermediate powers stay
// representable. p may be infinity.
double lp_norm(const std::vector<double>& v, double p);

// Dual function of the unit-ball projection of y_pos (all entries > 0).
// Powers of the prox values are normalized by their maximum once that
// maximum^p exceeds 1e10, which keeps the derivatives usable at large p.
DualEval eval_dual(const std::vector<double>& y_pos, double p, double mu);

// Upper end of the dual search interval: the Hoelder-conjugate norm ||y||_q
// for p > 1, the sup norm for p <= 1.
double mu_upper_bound(const std::vector<double>& y_pos, double p);

// Reduce (y, r, p) to a NormalizedInstance; flags interior when ||y||_p <= r.
NormalizedInstance normalize(const std::vector<double>& y, double r, double p);

// Map a solution of the normalized instance back to the source coordinates.
std::vector<double> denormalize(const NormalizedInstance& inst, const std::vector<double>& x_unit);

}  // namespace lpball
