#pragma once

// Rate-constant estimation from time courses using the closed-form
// pseudo-first-order model. Optimization runs over log(k1, k-1, k2) with a
// Levenberg-Marquardt damped Gauss-Newton iteration.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmlin/model.hpp"

namespace mmlin {

struct Observation {
  double t = 0.0;
  double s_obs = 0.0;
  std::optional<double> c_obs;
  double weight = 1.0;
};

struct Rates {
  double k1;
  double k_minus1;
  double k2;

  friend bool operator==(const Rates&, const Rates&) = default;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

enum class JacobianMode { Analytic, FiniteDifference };

struct FitOptions {
  std::size_t max_iterations = 200;
  double step_tol = 1e-10;
  double gradient_tol = 1e-10;
  /// Converged once a full Gauss-Newton step would lower the objective by
  /// less than this fraction, i.e. rounding noise.
  double reduction_tol = 1e-14;
  JacobianMode jacobian = JacobianMode::Analytic;
  /// Relative rate gap (A2 - A1) / A2 below which the two exponentials are
  /// considered indistinguishable.
  double identifiability_gap = 0.1;
};

struct FitResult {
  double k1 = 0.0;
  double k_minus1 = 0.0;
  double k2 = 0.0;
  /// sqrt(sum r_i^2 / m) over all stacked residuals.
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// sigma^2 (J^T J)^-1 in log-parameter space at the solution, with
  /// sigma^2 = SSR / (m - 3). NaN entries when the normal matrix is singular.
  Matrix3 covariance_proxy{};
  bool rank_deficient = false;
  bool identifiability_flag = false;
  /// Objective 0.5 * sum r_i^2 after the start and after every accepted step.
  std::vector<double> objective_history;
  std::vector<std::string> warnings;

  Rates rates() const { return {k1, k_minus1, k2}; }
};

/// Throws InvalidInput for fewer than 6 observations, non-increasing or
/// non-finite times, negative weights, non-positive e0, s0 or guess, and
/// when s0 >= K at the initial guess.
FitResult fit_rates(const std::vector<Observation>& data, double e0, double s0,
                    Rates guess, const FitOptions& options = {});

/// w_i (obs_i - model_i): all s residuals in data order, followed by the c
/// residuals of the observations that carry c_obs.
std::vector<double> residuals(const std::vector<Observation>& data, double e0, double s0,
                              Rates rates);

/// d residual / d log(rate), one row per residual, columns (k1, k-1, k2).
std::vector<std::array<double, 3>> residual_jacobian(const std::vector<Observation>& data,
                                                     double e0, double s0, Rates rates,
                                                     JacobianMode mode = JacobianMode::Analytic);

/// Noise-free observations of the linearized model at the given times,
/// optionally with complex values.
std::vector<Observation> synthesize(const RateParams& p, const std::vector<double>& times,
                                    bool with_complex = false);

struct MonteCarloSummary {
  std::size_t trials = 0;
  std::size_t converged = 0;
  std::size_t flagged = 0;
  /// Median |estimate / truth - 1| over converged trials.
  double median_rel_error_k1 = 0.0;
  double median_rel_error_k_minus1 = 0.0;
  double median_rel_error_k2 = 0.0;
};

/// Fits `trials` noisy copies of synthetic s-only data (Gaussian noise with
/// standard deviation noise_rel * s0). Trial i draws from a generator seeded
/// by a stream derived from `seed` and i, so results do not depend on
/// scheduling.
MonteCarloSummary fit_monte_carlo(const RateParams& truth, const std::vector<double>& times,
                                  double noise_rel, std::size_t trials, std::uint64_t seed,
                                  Rates guess, const FitOptions& options = {});

}  // namespace mmlin
