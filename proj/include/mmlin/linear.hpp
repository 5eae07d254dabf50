#pragma once

// Closed-form analysis of 2x2 linear systems of the form
//
//   d/dt (s, c) = [[-alpha, beta], [alpha, -gamma]] (s, c)
//
// with alpha, beta, gamma > 0. The linearized Michaelis-Menten system and
// both comparison systems (lower bound G, upper bound H) have this shape.

#include "mmlin/model.hpp"

namespace mmlin {

class LinearTriple {
 public:
  /// Throws InvalidInput unless all three entries are finite and > 0.
  LinearTriple(double alpha, double beta, double gamma);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  /// gamma > beta: both eigenvalues negative, so the flow decays and the
  /// triple yields usable bounds.
  bool usable() const { return gamma_ > beta_; }

  Matrix2 matrix() const { return {{{-alpha_, beta_}, {alpha_, -gamma_}}}; }
  State apply(State x) const {
    return {-alpha_ * x.s + beta_ * x.c, alpha_ * x.s - gamma_ * x.c};
  }

  friend bool operator==(const LinearTriple&, const LinearTriple&) = default;

 private:
  double alpha_;
  double beta_;
  double gamma_;
};

/// Real, distinct eigenvalues lambda1 > lambda2 with eigenvectors
/// (beta, (alpha - gamma +/- sqrt(delta)) / 2).
struct EigenPair {
  double lambda1;  // slow, closer to zero
  double lambda2;  // fast
  State v1;
  State v2;
  double delta;  // (alpha - gamma)^2 + 4 alpha beta
};

EigenPair eigen(const LinearTriple& tri);

/// x(t) = B1 exp(-A1 t) + B2 exp(-A2 t).
struct BiexpSolution {
  State B1;
  State B2;
  double A1;
  double A2;
};

/// Solution from the initial value (s0, 0).
BiexpSolution biexp_solve(const LinearTriple& tri, double s0);

/// Same, but takes the full initial state; throws InvalidInput when c != 0.
BiexpSolution biexp_solve(const LinearTriple& tri, State init);

/// Throws InvalidInput for t < 0.
State evaluate(const BiexpSolution& sol, double t);

/// Df(0): alpha = k1 e0, beta = k1 K_S, gamma = k1 K_M.
LinearTriple mm_linear_triple(const RateParams& p);

/// Lower comparison matrix G: K_M replaced by K_M + s0.
LinearTriple lower_triple(const RateParams& p);

/// Upper comparison matrix H: K_S replaced by K_S + s0. The result is not
/// usable() when s0 >= K, since one eigenvalue of H is then >= 0.
LinearTriple upper_triple(const RateParams& p);

/// Closed-form solution of the linearized system from (s0, 0).
/// Throws InvalidInput when p.c0() != 0.
BiexpSolution mm_linear_solution(const RateParams& p);

/// Same solution assembled directly from K_M, K_S and e0 with the radical
/// sqrt((K_M - e0)^2 + 4 K_S e0). Used to cross-check mm_linear_solution.
BiexpSolution mm_linear_solution_from_constants(const RateParams& p);

}  // namespace mmlin
