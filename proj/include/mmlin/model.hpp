#pragma once

// Irreversible Michaelis-Menten mechanism: rate parameters, derived constants,
// the mass-action vector field and the physically relevant region D.

#include <array>

namespace mmlin {

/// Point in (s, c) phase space. Also used for time derivatives and
/// direction vectors.
struct State {
  double s = 0.0;
  double c = 0.0;

  friend constexpr State operator+(State a, State b) { return {a.s + b.s, a.c + b.c}; }
  friend constexpr State operator-(State a, State b) { return {a.s - b.s, a.c - b.c}; }
  friend constexpr State operator*(double k, State a) { return {k * a.s, k * a.c}; }
  friend constexpr State operator*(State a, double k) { return {k * a.s, k * a.c}; }
  constexpr State& operator+=(State o) {
    s += o.s;
    c += o.c;
    return *this;
  }
  friend constexpr bool operator==(State, State) = default;
};

/// The five physical parameters of the mechanism plus the initial complex
/// concentration. Construction validates k1, k_minus1, k2, e0, s0 > 0 and
/// 0 <= c0 <= e0; invalid values throw InvalidInput.
class RateParams {
 public:
  RateParams(double k1, double k_minus1, double k2, double e0, double s0,
             double c0 = 0.0);

  double k1() const { return k1_; }
  double k_minus1() const { return k_minus1_; }
  double k2() const { return k2_; }
  double e0() const { return e0_; }
  double s0() const { return s0_; }
  double c0() const { return c0_; }

  State initial_state() const { return {s0_, c0_}; }

  RateParams with_s0(double s0) const { return {k1_, k_minus1_, k2_, e0_, s0, c0_}; }
  RateParams with_e0(double e0) const { return {k1_, k_minus1_, k2_, e0, s0_, c0_}; }
  RateParams with_c0(double c0) const { return {k1_, k_minus1_, k2_, e0_, s0_, c0}; }

  friend bool operator==(const RateParams&, const RateParams&) = default;

 private:
  double k1_;
  double k_minus1_;
  double k2_;
  double e0_;
  double s0_;
  double c0_;
};

/// K_S = k-1/k1 (complex equilibrium), K_M = (k-1 + k2)/k1 (Michaelis),
/// K = k2/k1 (Van Slyke-Cullen).
struct DerivedConstants {
  double K_S;
  double K_M;
  double K;
};

DerivedConstants derive_constants(const RateParams& p);

/// Right-hand side of the nonlinear mass-action system.
State mm_rhs(State x, const RateParams& p);

/// Row-major 2x2 matrix.
using Matrix2 = std::array<std::array<double, 2>, 2>;

Matrix2 mm_jacobian(State x, const RateParams& p);

inline constexpr double kDefaultRegionSlack = 1e-9;

/// Membership in D = {s >= 0, 0 <= c <= e0, s + c <= s0 + c0}, each
/// inequality relaxed by the absolute `slack`.
bool in_region_D(State x, const RateParams& p, double slack = kDefaultRegionSlack);

}  // namespace mmlin
