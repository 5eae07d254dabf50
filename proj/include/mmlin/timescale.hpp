#pragma once

// Timescale diagnostics for the linearized system: exact eigenvalues through
// the separation index eta = 4 K e0 / (K_M + e0)^2, the slow-mode
// approximations valid for eta << 1, and the reduced one-dimensional flow.

#include <string_view>

#include "mmlin/model.hpp"

namespace mmlin {

enum class SeparationVerdict { WellSeparated, Marginal, NotSeparated };

std::string_view to_string(SeparationVerdict v);

/// eta < eta_sep: well separated; eta < eta_marginal: marginal; otherwise
/// not separated.
struct SeparationThresholds {
  double eta_sep = 0.1;
  double eta_marginal = 0.5;
};

struct TimescaleReport {
  double lambda1;  // slow
  double lambda2;  // fast
  double eta;
  double lambda1_approx;
  State v1_exact;
  State v1_approx;
  /// Acute angle between v1_exact and v1_approx, in radians.
  double v1_angle;
  SeparationThresholds thresholds;
  SeparationVerdict verdict;
};

double separation_index(const RateParams& p);

/// Throws InvalidInput unless 0 < eta_sep <= eta_marginal.
TimescaleReport analyze(const RateParams& p, SeparationThresholds thresholds = {});

/// -k2 e0 / (K_M + e0).
double slow_eigenvalue_approx(const RateParams& p);

/// (K_M - K e0 / (K_M + e0), e0).
State slow_eigenvector_approx(const RateParams& p);

/// init * exp(-k2 e0 t / (K_M + e0)); throws InvalidInput for t < 0.
State reduced_solution(const RateParams& p, State init, double t);

/// Acute angle between two directions in the plane.
double direction_angle(State u, State v);

}  // namespace mmlin
