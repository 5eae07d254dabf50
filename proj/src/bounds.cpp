#include "mmlin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "mmlin/error.hpp"

namespace mmlin {

namespace {

void require_closed_form_start(const RateParams& p) {
  if (p.c0() != 0.0) {
    throw InvalidInput("comparison bounds are defined for c0 = 0 only");
  }
}

void require_below_K(const RateParams& p) {
  const double K = derive_constants(p).K;
  if (!(p.s0() < K)) {
    throw InvalidInput("s0 = " + std::to_string(p.s0()) + " is not below K = k2/k1 = " +
                       std::to_string(K) +
                       ": the upper comparison system has a nonnegative eigenvalue, "
                       "so the upper estimates become useless");
  }
}

// States of `traj` at the given times, which the integrator hit exactly.
std::vector<State> sample_exact(const Trajectory& traj, const std::vector<double>& grid) {
  std::vector<State> out;
  out.reserve(grid.size());
  std::size_t j = 0;
  for (double t : grid) {
    while (j < traj.size() && traj.times[j] < t) ++j;
    out.push_back(j < traj.size() && traj.times[j] == t ? traj.states[j] : traj.at(t));
  }
  return out;
}

}  // namespace

double sandwich_slack(const RateParams& p, const IntegratorConfig& cfg) {
  return 10.0 * cfg.effective_tol(p.s0()) + 1e-12 * p.s0();
}

SandwichReport sandwich_check(const RateParams& p, std::size_t n_grid,
                              const IntegratorConfig& cfg) {
  require_closed_form_start(p);
  require_below_K(p);

  SandwichReport r;
  r.T = kNonlinearHorizonFactor * horizon(p);
  r.grid = uniform_grid(r.T, n_grid);
  r.slack = sandwich_slack(p, cfg);

  const Trajectory traj = integrate_mm(p, r.T, cfg, r.grid);
  const std::vector<State> num = sample_exact(traj, r.grid);
  const BiexpSolution low = biexp_solve(lower_triple(p), p.s0());
  const BiexpSolution star = mm_linear_solution(p);
  const BiexpSolution up = biexp_solve(upper_triple(p), p.s0());

  double worst = -std::numeric_limits<double>::infinity();
  auto check = [&worst](double lo, double hi) { worst = std::max(worst, lo - hi); };
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const double t = r.grid[i];
    const State xl = evaluate(low, t);
    const State xs = evaluate(star, t);
    const State xu = evaluate(up, t);
    const State xn = num[i];
    r.s_low.push_back(xl.s);
    r.s_star.push_back(xs.s);
    r.s_up.push_back(xu.s);
    r.s_num.push_back(xn.s);
    r.c_low.push_back(xl.c);
    r.c_star.push_back(xs.c);
    r.c_up.push_back(xu.c);
    r.c_num.push_back(xn.c);

    check(xn.s, xu.s);
    check(xl.s, xn.s);
    check(xs.s, xu.s);
    check(xl.s, xs.s);
    check(xn.c, xu.c);
    check(xl.c, xn.c);
    check(xs.c, xu.c);
    check(xl.c, xs.c);
  }
  r.max_violation = worst;
  r.passed = worst <= r.slack;
  return r;
}

SupError sup_error(const RateParams& p, const IntegratorConfig& cfg, std::size_t n_uniform) {
  require_closed_form_start(p);
  const double K = derive_constants(p).K;
  if (!(p.s0() <= 0.5 * K * (1.0 + 1e-12))) {
    throw InvalidInput("sup_error requires s0 <= K/2; got s0 = " + std::to_string(p.s0()) +
                       ", K = " + std::to_string(K));
  }
  const double T = kNonlinearHorizonFactor * horizon(p);
  const std::vector<double> grid = uniform_grid(T, n_uniform);
  const Trajectory traj = integrate_mm(p, T, cfg, grid);
  const BiexpSolution star = mm_linear_solution(p);

  SupError e;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State diff = traj.states[i] - evaluate(star, traj.times[i]);
    e.err_s = std::max(e.err_s, std::abs(diff.s));
    e.err_c = std::max(e.err_c, std::abs(diff.c));
  }
  return e;
}

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("line fit needs two equally long samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw InvalidInput("line fit needs at least two distinct abscissae");
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

OrderReport convergence_order(const RateParams& p, double s0_max, std::size_t n_points,
                              const IntegratorConfig& cfg) {
  constexpr std::size_t kMinPoints = 4;
  if (n_points < kMinPoints) {
    throw InvalidInput("convergence_order needs n_points >= 4, got " +
                       std::to_string(n_points));
  }
  const double K = derive_constants(p).K;
  if (!(s0_max > 0.0) || !(s0_max <= 0.5 * K * (1.0 + 1e-12))) {
    throw InvalidInput("convergence_order needs 0 < s0_max <= K/2; got s0_max = " +
                       std::to_string(s0_max) + ", K = " + std::to_string(K));
  }
  cfg.validate();

  const RateParams base = p.with_c0(0.0);
  std::vector<std::future<SupError>> jobs;
  std::vector<double> s0s;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double s0 = s0_max / std::ldexp(1.0, static_cast<int>(i));
    s0s.push_back(s0);
    jobs.push_back(std::async(std::launch::async, [base, s0, cfg] {
      return sup_error(base.with_s0(s0), cfg);
    }));
  }

  OrderReport r;
  std::vector<double> lx, ls, lc;
  for (std::size_t i = 0; i < n_points; ++i) {
    try {
      const SupError e = jobs[i].get();
      if (!(e.err_s > 0.0) || !(e.err_c > 0.0)) {
        ++r.failed_points;
        continue;
      }
      r.s0_values.push_back(s0s[i]);
      r.sup_errors_s.push_back(e.err_s);
      r.sup_errors_c.push_back(e.err_c);
      lx.push_back(std::log(s0s[i]));
      ls.push_back(std::log(e.err_s));
      lc.push_back(std::log(e.err_c));
    } catch (const NumericalFailure&) {
      ++r.failed_points;
    }
  }
  if (r.s0_values.size() < kMinPoints) {
    throw NumericalFailure("only " + std::to_string(r.s0_values.size()) +
                           " of " + std::to_string(n_points) +
                           " convergence points succeeded; at least 4 are required");
  }
  const LineFit fs = least_squares_line(lx, ls);
  const LineFit fc = least_squares_line(lx, lc);
  r.slope_s = fs.slope;
  r.slope_c = fc.slope;
  r.constant_s = std::exp(fs.intercept);
  r.constant_c = std::exp(fc.intercept);
  return r;
}

}  // namespace mmlin
