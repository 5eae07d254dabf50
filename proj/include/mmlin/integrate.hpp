#pragma once

// Adaptive Dormand-Prince 5(4) integration of planar systems, used as the
// ground truth against which every closed form is compared.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mmlin/linear.hpp"
#include "mmlin/model.hpp"

namespace mmlin {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 10'000'000;
  /// Keep per-step derivatives so Trajectory::at() can interpolate.
  bool dense_output = true;

  /// Throws InvalidInput unless both tolerances are > 0 and max_steps > 0.
  void validate() const;

  /// Absolute error level targeted for a solution of magnitude `scale`.
  double effective_tol(double scale) const { return abs_tol + rel_tol * scale; }
};

/// Accepted-step output of an integration run.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  /// Derivative at each stored point; empty unless dense output was requested.
  std::vector<State> derivatives;
  /// Normalized embedded error estimate of the step ending at each point
  /// (<= 1 for accepted steps; 0 for the initial point).
  std::vector<double> est_local_error;
  IntegratorConfig tol;
  /// Magnitude used in the relative part of the error norm.
  double scale = 0.0;
  std::size_t rejected_steps = 0;
  /// Accepted states outside D by more than 10 effective tolerances
  /// (nonlinear runs only; always 0 for a correct integrator).
  std::size_t region_violations = 0;

  std::size_t size() const { return times.size(); }
  double final_time() const { return times.back(); }

  /// Cubic Hermite interpolation between accepted steps. Requires dense
  /// output and 0 <= t <= final_time(); throws InvalidInput otherwise.
  State at(double t) const;
};

using VectorField = std::function<State(const State&)>;

/// Integrates dx/dt = field(x) on [0, T] from `init`. Every time in
/// `output_times` (sorted, within [0, T]) is hit exactly by shortening the
/// step that would cross it, so those points appear in the trajectory.
/// Throws InvalidInput for T <= 0 and NumericalFailure when max_steps is
/// exhausted or the step size underflows.
Trajectory integrate(const VectorField& field, State init, double T,
                     const IntegratorConfig& cfg, double scale,
                     std::span<const double> output_times = {});

/// Nonlinear Michaelis-Menten system from (s0, c0).
Trajectory integrate_mm(const RateParams& p, double T,
                        const IntegratorConfig& cfg = {},
                        std::span<const double> output_times = {});

/// Nonlinear system from an arbitrary initial state; D is still the region
/// defined by p.
Trajectory integrate_mm(const RateParams& p, State init, double T,
                        const IntegratorConfig& cfg = {},
                        std::span<const double> output_times = {});

Trajectory integrate_linear(const LinearTriple& tri, State init, double T,
                            const IntegratorConfig& cfg = {},
                            std::span<const double> output_times = {});

inline constexpr double kDefaultHorizonEps = 1e-6;

/// Time after which both components of the linearized solution are below
/// eps * s0: ln(Cmax / eps) / A1, with Cmax = max_i (|B1_i| + |B2_i|) / s0.
/// Independent of s0. Returns 0 when the bound already holds at t = 0.
double horizon(const RateParams& p, double eps = kDefaultHorizonEps);

/// Horizon used for nonlinear runs: twice the linear one.
inline constexpr double kNonlinearHorizonFactor = 2.0;

/// `n` equally spaced points covering [0, T] including both ends.
std::vector<double> uniform_grid(double T, std::size_t n);

}  // namespace mmlin
