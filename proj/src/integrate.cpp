#include "mmlin/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmlin/error.hpp"

namespace mmlin {

namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, Table II.5.2).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMinShrink = 0.2;
constexpr double kMaxGrow = 10.0;

struct Weights {
  double abs_tol;
  double rel_tol;
  double scale;

  double norm(State err, State y0, State y1) const {
    const double ws = abs_tol + rel_tol * std::max({std::abs(y0.s), std::abs(y1.s), scale});
    const double wc = abs_tol + rel_tol * std::max({std::abs(y0.c), std::abs(y1.c), scale});
    const double es = err.s / ws;
    const double ec = err.c / wc;
    return std::sqrt(0.5 * (es * es + ec * ec));
  }
};

double initial_step(const VectorField& f, State y0, State f0, double T,
                    const Weights& w) {
  const double d0 = w.norm(y0, {}, {});
  const double d1 = w.norm(f0, {}, {});
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, T);
  const State f1 = f(y0 + h0 * f0);
  const double d2 = w.norm(f1 - f0, {}, {}) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 =
      dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, T});
}

bool finite(State x) { return std::isfinite(x.s) && std::isfinite(x.c); }

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !std::isfinite(rel_tol) ||
      !std::isfinite(abs_tol)) {
    throw InvalidInput("integrator tolerances must be finite and > 0");
  }
  if (max_steps == 0) {
    throw InvalidInput("integrator max_steps must be > 0");
  }
}

State Trajectory::at(double t) const {
  if (derivatives.size() != times.size()) {
    throw InvalidInput("trajectory has no dense output");
  }
  if (!(t >= times.front() && t <= times.back())) {
    throw InvalidInput("interpolation time " + std::to_string(t) +
                       " outside the integrated interval");
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return states.back();
  const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double h = times[i + 1] - times[i];
  const double th = (t - times[i]) / h;
  const double om = 1.0 - th;
  const double h00 = (1.0 + 2.0 * th) * om * om;
  const double h10 = th * om * om;
  const double h01 = th * th * (3.0 - 2.0 * th);
  const double h11 = th * th * (th - 1.0);
  return h00 * states[i] + (h10 * h) * derivatives[i] + h01 * states[i + 1] +
         (h11 * h) * derivatives[i + 1];
}

Trajectory integrate(const VectorField& f, State init, double T,
                     const IntegratorConfig& cfg, double scale,
                     std::span<const double> output_times) {
  cfg.validate();
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InvalidInput("integration horizon must be finite and > 0, got " +
                       std::to_string(T));
  }
  if (!std::is_sorted(output_times.begin(), output_times.end()) ||
      (!output_times.empty() && (output_times.front() < 0.0 || output_times.back() > T))) {
    throw InvalidInput("output times must be sorted and lie within [0, T]");
  }

  const Weights w{cfg.abs_tol, cfg.rel_tol, scale};
  Trajectory traj;
  traj.tol = cfg;
  traj.scale = scale;

  double t = 0.0;
  State y = init;
  State k1 = f(y);
  traj.times.push_back(t);
  traj.states.push_back(y);
  traj.est_local_error.push_back(0.0);
  if (cfg.dense_output) traj.derivatives.push_back(k1);

  auto next_out = std::upper_bound(output_times.begin(), output_times.end(), 0.0);
  double h = initial_step(f, y, k1, T, w);
  double err_prev = 1e-4;
  std::size_t steps = 0;

  while (t < T) {
    if (++steps > cfg.max_steps) {
      throw NumericalFailure("integrator exceeded max_steps = " +
                             std::to_string(cfg.max_steps) + " at t = " +
                             std::to_string(t) +
                             "; the problem may be stiff, reduce T or loosen tolerances");
    }
    const double target = next_out != output_times.end() ? *next_out : T;
    bool hits_target = false;
    double step = h;
    if (t + 1.01 * step >= target) {
      step = target - t;
      hits_target = true;
    }
    if (!(step > 0.0) || t + step == t) {
      throw NumericalFailure("step size underflow at t = " + std::to_string(t));
    }

    const State k2 = f(y + step * (a21 * k1));
    const State k3 = f(y + step * (a31 * k1 + a32 * k2));
    const State k4 = f(y + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = f(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y_new = y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(y_new);
    const State err_vec = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = w.norm(err_vec, y, y_new);

    if (!finite(y_new) || !std::isfinite(err)) {
      throw NumericalFailure("integrator produced non-finite state at t = " +
                             std::to_string(t));
    }

    const double fac11 = std::pow(std::max(err, 1e-300), kExpo);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(err_prev, kBeta) / kSafety;
      fac = std::clamp(fac, 1.0 / kMaxGrow, 1.0 / kMinShrink);
      const double h_next = step / fac;
      err_prev = std::max(err, 1e-4);

      t = hits_target ? target : t + step;
      y = y_new;
      k1 = k7;
      traj.times.push_back(t);
      traj.states.push_back(y);
      traj.est_local_error.push_back(err);
      if (cfg.dense_output) traj.derivatives.push_back(k1);
      if (hits_target && next_out != output_times.end()) {
        next_out = std::upper_bound(next_out, output_times.end(), t);
      }
      // A step shortened to land on an output time says little about the
      // natural step size; keep the larger proposal.
      h = hits_target ? std::max(h, h_next) : h_next;
    } else {
      ++traj.rejected_steps;
      h = step / std::min(1.0 / kMinShrink, fac11 / kSafety);
    }
  }
  return traj;
}

Trajectory integrate_mm(const RateParams& p, double T, const IntegratorConfig& cfg,
                        std::span<const double> output_times) {
  return integrate_mm(p, p.initial_state(), T, cfg, output_times);
}

Trajectory integrate_mm(const RateParams& p, State init, double T,
                        const IntegratorConfig& cfg, std::span<const double> output_times) {
  const double scale = std::max(p.s0(), p.c0());
  Trajectory traj = integrate(
      [&p](const State& x) { return mm_rhs(x, p); }, init, T, cfg, scale, output_times);
  const double slack = 10.0 * cfg.effective_tol(scale);
  traj.region_violations = static_cast<std::size_t>(std::count_if(
      traj.states.begin(), traj.states.end(),
      [&](const State& x) { return !in_region_D(x, p, slack); }));
  return traj;
}

Trajectory integrate_linear(const LinearTriple& tri, State init, double T,
                            const IntegratorConfig& cfg,
                            std::span<const double> output_times) {
  const double scale = std::max(std::abs(init.s), std::abs(init.c));
  return integrate([&tri](const State& x) { return tri.apply(x); }, init, T, cfg, scale,
                   output_times);
}

double horizon(const RateParams& p, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidInput("horizon eps must lie in (0, 1), got " + std::to_string(eps));
  }
  const BiexpSolution unit = biexp_solve(mm_linear_triple(p), 1.0);
  const double cmax = std::max(std::abs(unit.B1.s) + std::abs(unit.B2.s),
                               std::abs(unit.B1.c) + std::abs(unit.B2.c));
  return std::max(0.0, std::log(cmax / eps) / unit.A1);
}

std::vector<double> uniform_grid(double T, std::size_t n) {
  if (n < 2) {
    throw InvalidInput("a time grid needs at least 2 points");
  }
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.back() = T;
  return grid;
}

}  // namespace mmlin
