#include "mmlin/timescale.hpp"

#include <cmath>
#include <string>

#include "mmlin/error.hpp"

namespace mmlin {

std::string_view to_string(SeparationVerdict v) {
  switch (v) {
    case SeparationVerdict::WellSeparated:
      return "well-separated";
    case SeparationVerdict::Marginal:
      return "marginal";
    case SeparationVerdict::NotSeparated:
      return "not-separated";
  }
  return "unknown";
}

double separation_index(const RateParams& p) {
  const auto [K_S, K_M, K] = derive_constants(p);
  const double sum = K_M + p.e0();
  return 4.0 * K * p.e0() / (sum * sum);
}

TimescaleReport analyze(const RateParams& p, SeparationThresholds thresholds) {
  if (!(thresholds.eta_sep > 0.0) || !(thresholds.eta_marginal >= thresholds.eta_sep)) {
    throw InvalidInput("separation thresholds must satisfy 0 < eta_sep <= eta_marginal");
  }
  const auto [K_S, K_M, K] = derive_constants(p);
  const double e0 = p.e0();
  const double k1 = p.k1();
  const double sum = K_M + e0;
  const double diff = K_M - e0;

  TimescaleReport r{};
  r.eta = 4.0 * K * e0 / (sum * sum);
  // 1 - eta, without cancellation near eta = 1.
  const double radicand = diff * diff + 4.0 * K_S * e0;
  const double one_minus_eta = radicand / (sum * sum);
  r.lambda2 = -0.5 * k1 * sum * (1.0 + std::sqrt(one_minus_eta));
  // lambda1 * lambda2 = k1^2 K e0 = k1 k2 e0.
  r.lambda1 = k1 * p.k2() * e0 / r.lambda2;

  const double root = std::sqrt(radicand);
  const double first = diff >= 0.0 ? diff + root : 4.0 * K_S * e0 / (root - diff);
  r.v1_exact = {first, 2.0 * e0};
  r.lambda1_approx = slow_eigenvalue_approx(p);
  r.v1_approx = slow_eigenvector_approx(p);
  r.v1_angle = direction_angle(r.v1_exact, r.v1_approx);

  r.thresholds = thresholds;
  if (r.eta < thresholds.eta_sep) {
    r.verdict = SeparationVerdict::WellSeparated;
  } else if (r.eta < thresholds.eta_marginal) {
    r.verdict = SeparationVerdict::Marginal;
  } else {
    r.verdict = SeparationVerdict::NotSeparated;
  }
  return r;
}

double slow_eigenvalue_approx(const RateParams& p) {
  return -p.k2() * p.e0() / (derive_constants(p).K_M + p.e0());
}

State slow_eigenvector_approx(const RateParams& p) {
  const auto [K_S, K_M, K] = derive_constants(p);
  return {K_M - K * p.e0() / (K_M + p.e0()), p.e0()};
}

State reduced_solution(const RateParams& p, State init, double t) {
  if (!(t >= 0.0)) {
    throw InvalidInput("reduced solution time must be >= 0, got " + std::to_string(t));
  }
  return std::exp(slow_eigenvalue_approx(p) * t) * init;
}

double direction_angle(State u, State v) {
  const double cross = u.s * v.c - u.c * v.s;
  const double dot = u.s * v.s + u.c * v.c;
  return std::atan2(std::abs(cross), std::abs(dot));
}

}  // namespace mmlin
