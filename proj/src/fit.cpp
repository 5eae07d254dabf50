#include "mmlin/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include <Eigen/Dense>

#include "mmlin/error.hpp"
#include "mmlin/linear.hpp"

namespace mmlin {

namespace {

constexpr std::size_t kMinObservations = 6;

// Model value and its partial derivatives with respect to the matrix
// entries alpha, beta, gamma of the linearized system.
struct ModelPartials {
  State value;
  State d_alpha;
  State d_beta;
  State d_gamma;
};

ModelPartials model_partials(double a, double b, double g, double s0, double t) {
  const double d = a - g;
  const double q = 4.0 * a * b;
  const double R = std::sqrt(d * d + q);
  const double P = d <= 0.0 ? -d + R : q / (R + d);  // gamma - alpha + R
  const double Q = d >= 0.0 ? d + R : q / (R - d);   // alpha - gamma + R
  const double lambda2 = -0.5 * ((a + g) + R);
  const double lambda1 = a * (g - b) / lambda2;
  const double e1 = std::exp(lambda1 * t);
  const double e2 = std::exp(lambda2 * t);

  ModelPartials m;
  m.value = {s0 / (2.0 * R) * (P * e1 + Q * e2), s0 * a / R * (e1 - e2)};

  auto partial = [&](double da, double db, double dg) -> State {
    const double dDelta = (2.0 * d + 4.0 * b) * da + 4.0 * a * db - 2.0 * d * dg;
    const double dR = dDelta / (2.0 * R);
    const double dP = dg - da + dR;
    const double dQ = da - dg + dR;
    const double dl1 = 0.5 * (-da - dg + dR);
    const double dl2 = 0.5 * (-da - dg - dR);
    const double ds =
        s0 * (-dR / (2.0 * R * R) * (P * e1 + Q * e2) +
              (dP * e1 + P * t * dl1 * e1 + dQ * e2 + Q * t * dl2 * e2) / (2.0 * R));
    const double dc = s0 * ((da / R - a * dR / (R * R)) * (e1 - e2) +
                            a / R * t * (dl1 * e1 - dl2 * e2));
    return {ds, dc};
  };
  m.d_alpha = partial(1.0, 0.0, 0.0);
  m.d_beta = partial(0.0, 1.0, 0.0);
  m.d_gamma = partial(0.0, 0.0, 1.0);
  return m;
}

std::size_t residual_count(const std::vector<Observation>& data) {
  return data.size() + static_cast<std::size_t>(std::count_if(
                           data.begin(), data.end(),
                           [](const Observation& o) { return o.c_obs.has_value(); }));
}

Rates from_log(const Eigen::Vector3d& theta) {
  return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
}

void validate_inputs(const std::vector<Observation>& data, double e0, double s0) {
  if (!(e0 > 0.0) || !(s0 > 0.0) || !std::isfinite(e0) || !std::isfinite(s0)) {
    throw InvalidInput("e0 and s0 must be finite and > 0");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& o = data[i];
    if (!std::isfinite(o.t) || o.t < 0.0 || !std::isfinite(o.s_obs) ||
        (o.c_obs && !std::isfinite(*o.c_obs)) || !std::isfinite(o.weight) || o.weight < 0.0) {
      throw InvalidInput("observation " + std::to_string(i) +
                         " has a negative or non-finite entry");
    }
    if (i > 0 && !(o.t > data[i - 1].t)) {
      throw InvalidInput("observation times must be strictly increasing (row " +
                         std::to_string(i) + ")");
    }
  }
}

Eigen::MatrixXd jacobian_matrix(const std::vector<Observation>& data, double e0, double s0,
                                Rates rates, JacobianMode mode) {
  const auto rows = residual_jacobian(data, e0, s0, rates, mode);
  Eigen::MatrixXd J(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < 3; ++j) J(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return J;
}

Eigen::VectorXd residual_vector(const std::vector<Observation>& data, double e0, double s0,
                                Rates rates) {
  const std::vector<double> r = residuals(data, e0, s0, rates);
  return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

// Largest cosine between the residual vector and a Jacobian column.
double gradient_measure(const Eigen::MatrixXd& J, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  if (rn == 0.0) return 0.0;
  const Eigen::Vector3d g = J.transpose() * r;
  double worst = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double cn = J.col(j).norm();
    if (cn > 0.0) worst = std::max(worst, std::abs(g[j]) / (cn * rn));
  }
  return worst;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> residuals(const std::vector<Observation>& data, double e0, double s0,
                              Rates rates) {
  const BiexpSolution sol =
      mm_linear_solution(RateParams(rates.k1, rates.k_minus1, rates.k2, e0, s0));
  std::vector<double> r;
  r.reserve(residual_count(data));
  for (const Observation& o : data) {
    r.push_back(o.weight * (o.s_obs - evaluate(sol, o.t).s));
  }
  for (const Observation& o : data) {
    if (o.c_obs) r.push_back(o.weight * (*o.c_obs - evaluate(sol, o.t).c));
  }
  return r;
}

std::vector<std::array<double, 3>> residual_jacobian(const std::vector<Observation>& data,
                                                     double e0, double s0, Rates rates,
                                                     JacobianMode mode) {
  std::vector<std::array<double, 3>> rows(residual_count(data));
  if (mode == JacobianMode::FiniteDifference) {
    constexpr double h = 1e-6;
    const Eigen::Vector3d theta(std::log(rates.k1), std::log(rates.k_minus1),
                                std::log(rates.k2));
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d up = theta, down = theta;
      up[j] += h;
      down[j] -= h;
      const std::vector<double> rp = residuals(data, e0, s0, from_log(up));
      const std::vector<double> rm = residuals(data, e0, s0, from_log(down));
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i][j] = (rp[i] - rm[i]) / (2.0 * h);
    }
    return rows;
  }

  const double a = rates.k1 * e0;
  const double b = rates.k_minus1;
  const double g = rates.k_minus1 + rates.k2;
  std::vector<ModelPartials> partials;
  partials.reserve(data.size());
  for (const Observation& o : data) partials.push_back(model_partials(a, b, g, s0, o.t));

  // alpha = k1 e0, beta = k-1, gamma = k-1 + k2, differentiated in log space.
  auto chain = [&](const ModelPartials& m, double State::*comp, double w) {
    return std::array<double, 3>{-w * a * (m.d_alpha.*comp),
                                 -w * b * ((m.d_beta.*comp) + (m.d_gamma.*comp)),
                                 -w * rates.k2 * (m.d_gamma.*comp)};
  };
  std::size_t row = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    rows[row++] = chain(partials[i], &State::s, data[i].weight);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].c_obs) rows[row++] = chain(partials[i], &State::c, data[i].weight);
  }
  return rows;
}

FitResult fit_rates(const std::vector<Observation>& data, double e0, double s0, Rates guess,
                    const FitOptions& options) {
  if (data.size() < kMinObservations) {
    throw InvalidInput("fitting needs at least 6 observations, got " +
                       std::to_string(data.size()));
  }
  validate_inputs(data, e0, s0);
  const RateParams start(guess.k1, guess.k_minus1, guess.k2, e0, s0);
  if (!(s0 < derive_constants(start).K)) {
    throw InvalidInput(
        "s0 >= K = k2/k1 at the initial guess: the pseudo-first-order model is not a "
        "valid description of such data");
  }

  FitResult res;
  const double A1_guess = mm_linear_solution(start).A1;
  if (data.back().t * A1_guess < 1.0) {
    res.warnings.push_back("observations span less than one slow time constant of the guess");
  }

  Eigen::Vector3d theta(std::log(guess.k1), std::log(guess.k_minus1), std::log(guess.k2));
  Rates rates = guess;
  Eigen::VectorXd r = residual_vector(data, e0, s0, rates);
  Eigen::MatrixXd J = jacobian_matrix(data, e0, s0, rates, options.jacobian);
  if (!J.allFinite()) J = jacobian_matrix(data, e0, s0, rates, JacobianMode::FiniteDifference);
  double f = 0.5 * r.squaredNorm();
  res.objective_history.push_back(f);

  double obs_scale = 0.0;
  for (const Observation& o : data) {
    obs_scale = std::max(obs_scale, std::abs(o.weight * o.s_obs));
    if (o.c_obs) obs_scale = std::max(obs_scale, std::abs(o.weight * *o.c_obs));
  }

  Eigen::Matrix3d A = J.transpose() * J;
  double mu = 1e-3 * A.diagonal().maxCoeff();
  const double mu_ceiling = 1e20 * std::max(A.diagonal().maxCoeff(), 1e-300);

  while (res.iterations < options.max_iterations) {
    A = J.transpose() * J;
    const Eigen::Vector3d grad = J.transpose() * r;
    if (gradient_measure(J, r) <= options.gradient_tol) {
      res.converged = true;
      break;
    }
    // Objective decrease promised by a full Gauss-Newton step.
    const double predicted = 0.5 * grad.dot(A.ldlt().solve(grad));
    if (std::isfinite(predicted) && predicted >= 0.0 &&
        predicted <= options.reduction_tol * f) {
      res.converged = true;
      break;
    }
    ++res.iterations;

    const Eigen::Matrix3d damped = A + mu * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d delta = damped.ldlt().solve(-grad);
    if (!delta.allFinite()) {
      mu *= 3.0;
      continue;
    }
    const Eigen::Vector3d theta_new = theta + delta;
    const Rates trial = from_log(theta_new);
    Eigen::VectorXd r_new;
    bool ok = trial.k1 > 0.0 && trial.k_minus1 > 0.0 && trial.k2 > 0.0 &&
              std::isfinite(trial.k1) && std::isfinite(trial.k_minus1) &&
              std::isfinite(trial.k2);
    if (ok) {
      r_new = residual_vector(data, e0, s0, trial);
      ok = r_new.allFinite();
    }
    const double f_new = ok ? 0.5 * r_new.squaredNorm() : std::numeric_limits<double>::infinity();

    if (f_new < f) {
      theta = theta_new;
      rates = trial;
      r = std::move(r_new);
      f = f_new;
      res.objective_history.push_back(f);
      J = jacobian_matrix(data, e0, s0, rates, options.jacobian);
      if (!J.allFinite()) {
        J = jacobian_matrix(data, e0, s0, rates, JacobianMode::FiniteDifference);
      }
      mu /= 2.0;
      if (delta.cwiseAbs().maxCoeff() < options.step_tol) {
        res.converged = true;
        break;
      }
    } else {
      mu *= 3.0;
      if (mu > mu_ceiling) {
        // No decrease is possible any more; accept if the residual sits at
        // the rounding floor of the data.
        res.converged =
            r.cwiseAbs().maxCoeff() <= 64.0 * std::numeric_limits<double>::epsilon() * obs_scale;
        if (!res.converged) res.warnings.push_back("damping exhausted without convergence");
        break;
      }
    }
  }
  if (!res.converged && res.iterations >= options.max_iterations) {
    res.warnings.push_back("maximum number of iterations reached");
  }

  res.k1 = rates.k1;
  res.k_minus1 = rates.k_minus1;
  res.k2 = rates.k2;
  const auto m = static_cast<double>(r.size());
  res.residual_norm = std::sqrt(2.0 * f / m);

  A = J.transpose() * J;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A);
  const double max_ev = es.eigenvalues().maxCoeff();
  const double min_ev = es.eigenvalues().minCoeff();
  res.rank_deficient = !(max_ev > 0.0) || min_ev <= 1e-14 * max_ev;
  const double sigma2 = r.size() > 3 ? 2.0 * f / (m - 3.0) : 0.0;
  Eigen::Matrix3d cov;
  if (res.rank_deficient) {
    cov.setConstant(std::numeric_limits<double>::quiet_NaN());
    res.warnings.push_back("normal equations are rank deficient");
  } else {
    cov = sigma2 * A.inverse();
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) res.covariance_proxy[i][j] = cov(i, j);
  }

  const BiexpSolution fitted =
      mm_linear_solution(RateParams(res.k1, res.k_minus1, res.k2, e0, s0));
  const double gap = (fitted.A2 - fitted.A1) / fitted.A2;
  if (gap < options.identifiability_gap) {
    res.warnings.push_back("the two exponential rates are within " +
                           std::to_string(static_cast<int>(100 * options.identifiability_gap)) +
                           "% of each other; rate constants are poorly identifiable");
  }
  res.identifiability_flag = gap < options.identifiability_gap || res.rank_deficient;
  if (!(s0 < res.k2 / res.k1)) {
    res.warnings.push_back("estimated K = k2/k1 does not exceed s0; the linear model is outside its validity range");
  }
  return res;
}

std::vector<Observation> synthesize(const RateParams& p, const std::vector<double>& times,
                                    bool with_complex) {
  const BiexpSolution sol = mm_linear_solution(p);
  std::vector<Observation> out;
  out.reserve(times.size());
  for (double t : times) {
    const State x = evaluate(sol, t);
    Observation o{t, x.s, std::nullopt, 1.0};
    if (with_complex) o.c_obs = x.c;
    out.push_back(o);
  }
  return out;
}

MonteCarloSummary fit_monte_carlo(const RateParams& truth, const std::vector<double>& times,
                                  double noise_rel, std::size_t trials, std::uint64_t seed,
                                  Rates guess, const FitOptions& options) {
  if (!(noise_rel >= 0.0)) throw InvalidInput("noise level must be >= 0");
  const std::vector<Observation> clean = synthesize(truth, times);

  struct Trial {
    bool converged = false;
    bool flagged = false;
    std::array<double, 3> rel_err{};
  };
  std::vector<Trial> results(trials);

  auto run_trial = [&](std::size_t i) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(i)));
    std::normal_distribution<double> noise(0.0, noise_rel * truth.s0());
    std::vector<Observation> data = clean;
    for (Observation& o : data) o.s_obs += noise(rng);
    Trial out;
    try {
      const FitResult fr = fit_rates(data, truth.e0(), truth.s0(), guess, options);
      out.converged = fr.converged;
      out.flagged = fr.identifiability_flag;
      out.rel_err = {std::abs(fr.k1 / truth.k1() - 1.0),
                     std::abs(fr.k_minus1 / truth.k_minus1() - 1.0),
                     std::abs(fr.k2 / truth.k2() - 1.0)};
    } catch (const std::exception&) {
      out.converged = false;
    }
    results[i] = out;
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(trials, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < trials; i += workers) run_trial(i);
    });
  }
  for (std::thread& t : pool) t.join();

  MonteCarloSummary summary;
  summary.trials = trials;
  std::array<std::vector<double>, 3> errs;
  for (const Trial& t : results) {
    if (t.flagged) ++summary.flagged;
    if (!t.converged) continue;
    ++summary.converged;
    for (int j = 0; j < 3; ++j) errs[j].push_back(t.rel_err[j]);
  }
  summary.median_rel_error_k1 = median(errs[0]);
  summary.median_rel_error_k_minus1 = median(errs[1]);
  summary.median_rel_error_k2 = median(errs[2]);
  return summary;
}

}  // namespace mmlin
