#pragma once

// Comparison-bound experiments: the sandwich inequalities between the
// G-system, linearized, nonlinear and H-system solutions, and the
// second-order convergence of the nonlinear solution to the linearized one
// as s0 -> 0.

#include <cstddef>
#include <vector>

#include "mmlin/integrate.hpp"

namespace mmlin {

/// Curves sampled on a uniform grid of [0, T], T = 2 * horizon(p).
struct SandwichReport {
  double T = 0.0;
  std::vector<double> grid;
  std::vector<double> s_low, s_star, s_up, s_num;
  std::vector<double> c_low, c_star, c_up, c_num;
  /// Largest amount by which any of the eight inequalities fails (negative
  /// when all hold strictly).
  double max_violation = 0.0;
  double slack = 0.0;
  bool passed = false;
};

/// Slack used for bound checks: 10 effective integrator tolerances at the
/// s0 scale plus 1e-12 s0.
double sandwich_slack(const RateParams& p, const IntegratorConfig& cfg);

/// Throws InvalidInput when s0 >= K (the upper comparison system then has a
/// nonnegative eigenvalue and gives no decaying bound) or c0 != 0.
SandwichReport sandwich_check(const RateParams& p, std::size_t n_grid = 512,
                              const IntegratorConfig& cfg = {});

struct SupError {
  double err_s = 0.0;
  double err_c = 0.0;
};

/// Sup over [0, 2 horizon] of |s - s*| and |c - c*|, sampled at every
/// accepted integrator step plus `n_uniform` uniform points. Requires
/// s0 <= K/2 and c0 = 0.
SupError sup_error(const RateParams& p, const IntegratorConfig& cfg = {},
                   std::size_t n_uniform = 512);

struct OrderReport {
  std::vector<double> s0_values;  // decreasing
  std::vector<double> sup_errors_s;
  std::vector<double> sup_errors_c;
  double slope_s = 0.0;
  double slope_c = 0.0;
  /// exp of the fitted intercepts: err ~ C * s0^slope.
  double constant_s = 0.0;
  double constant_c = 0.0;
  std::size_t failed_points = 0;
};

struct LineFit {
  double slope;
  double intercept;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

/// Runs sup_error for s0 = s0_max, s0_max/2, ... (n_points values) with the
/// rate constants of p and fits log(error) against log(s0). Requires
/// s0_max <= K/2 and n_points >= 4; points whose integration fails are
/// dropped, and fewer than 4 survivors throw NumericalFailure.
OrderReport convergence_order(const RateParams& p, double s0_max, std::size_t n_points,
                              const IntegratorConfig& cfg = {});

}  // namespace mmlin
