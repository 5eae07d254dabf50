#include "mmlin/linear.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "mmlin/error.hpp"

namespace mmlin {

namespace {

// x + sqrt(x^2 + q) for q > 0 without cancellation when x < 0.
double add_root(double x, double root, double q) {
  return x >= 0.0 ? x + root : q / (root - x);
}

}  // namespace

LinearTriple::LinearTriple(double alpha, double beta, double gamma)
    : alpha_(alpha), beta_(beta), gamma_(gamma) {
  for (double v : {alpha, beta, gamma}) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw InvalidInput("linear triple entries must be finite and > 0, got (" +
                         std::to_string(alpha) + ", " + std::to_string(beta) + ", " +
                         std::to_string(gamma) + ")");
    }
  }
}

EigenPair eigen(const LinearTriple& tri) {
  const double a = tri.alpha();
  const double b = tri.beta();
  const double g = tri.gamma();
  const double d = a - g;
  const double q = 4.0 * a * b;
  const double delta = d * d + q;
  assert(delta > 0.0);
  const double root = std::sqrt(delta);

  // Larger-magnitude root first, the other from the determinant.
  const double lambda2 = -0.5 * ((a + g) + root);
  const double lambda1 = a * (g - b) / lambda2;

  const double v1c = 0.5 * add_root(d, root, q);
  const double v2c = -0.5 * add_root(-d, root, q);
  return {lambda1, lambda2, {b, v1c}, {b, v2c}, delta};
}

BiexpSolution biexp_solve(const LinearTriple& tri, double s0) {
  const EigenPair ep = eigen(tri);
  const double a = tri.alpha();
  const double d = a - tri.gamma();
  const double q = 4.0 * a * tri.beta();
  const double root = std::sqrt(ep.delta);
  const double scale = s0 / (2.0 * root);
  return {{scale * add_root(-d, root, q), scale * 2.0 * a},
          {scale * add_root(d, root, q), -scale * 2.0 * a},
          -ep.lambda1,
          -ep.lambda2};
}

BiexpSolution biexp_solve(const LinearTriple& tri, State init) {
  if (init.c != 0.0) {
    throw InvalidInput("closed-form solution requires c(0) = 0, got c(0) = " +
                       std::to_string(init.c));
  }
  return biexp_solve(tri, init.s);
}

State evaluate(const BiexpSolution& sol, double t) {
  if (!(t >= 0.0)) {
    throw InvalidInput("evaluation time must be >= 0, got " + std::to_string(t));
  }
  return std::exp(-sol.A1 * t) * sol.B1 + std::exp(-sol.A2 * t) * sol.B2;
}

LinearTriple mm_linear_triple(const RateParams& p) {
  return {p.k1() * p.e0(), p.k_minus1(), p.k_minus1() + p.k2()};
}

LinearTriple lower_triple(const RateParams& p) {
  return {p.k1() * p.e0(), p.k_minus1(), p.k_minus1() + p.k2() + p.k1() * p.s0()};
}

LinearTriple upper_triple(const RateParams& p) {
  return {p.k1() * p.e0(), p.k_minus1() + p.k1() * p.s0(), p.k_minus1() + p.k2()};
}

BiexpSolution mm_linear_solution(const RateParams& p) {
  return biexp_solve(mm_linear_triple(p), p.initial_state());
}

BiexpSolution mm_linear_solution_from_constants(const RateParams& p) {
  if (p.c0() != 0.0) {
    throw InvalidInput("closed-form solution requires c0 = 0");
  }
  const auto [K_S, K_M, K] = derive_constants(p);
  const double e0 = p.e0();
  const double s0 = p.s0();
  const double radical = std::sqrt((K_M - e0) * (K_M - e0) + 4.0 * K_S * e0);
  const double scale = s0 / (2.0 * radical);
  return {{scale * ((K_M - e0) + radical), scale * 2.0 * e0},
          {scale * (-(K_M - e0) + radical), -scale * 2.0 * e0},
          0.5 * ((K_M + e0) - radical) * p.k1(),
          0.5 * ((K_M + e0) + radical) * p.k1()};
}

}  // namespace mmlin
