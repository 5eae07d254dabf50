#include "mmlin/model.hpp"

#include <cmath>
#include <string>

#include "mmlin/error.hpp"

namespace mmlin {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw InvalidInput(std::string(name) + " must be finite and > 0, got " +
                       std::to_string(v));
  }
}

}  // namespace

RateParams::RateParams(double k1, double k_minus1, double k2, double e0,
                       double s0, double c0)
    : k1_(k1), k_minus1_(k_minus1), k2_(k2), e0_(e0), s0_(s0), c0_(c0) {
  require_positive(k1, "k1");
  require_positive(k_minus1, "k_minus1");
  require_positive(k2, "k2");
  require_positive(e0, "e0");
  require_positive(s0, "s0");
  if (!std::isfinite(c0) || c0 < 0.0 || c0 > e0) {
    throw InvalidInput("c0 must satisfy 0 <= c0 <= e0, got " + std::to_string(c0));
  }
}

DerivedConstants derive_constants(const RateParams& p) {
  return {p.k_minus1() / p.k1(), (p.k_minus1() + p.k2()) / p.k1(), p.k2() / p.k1()};
}

State mm_rhs(State x, const RateParams& p) {
  const double binding = p.k1() * p.e0() * x.s;
  const double release = p.k1() * x.s + p.k_minus1();
  return {-binding + release * x.c, binding - (release + p.k2()) * x.c};
}

Matrix2 mm_jacobian(State x, const RateParams& p) {
  const double k1 = p.k1();
  return {{{-k1 * (p.e0() - x.c), k1 * x.s + p.k_minus1()},
           {k1 * (p.e0() - x.c), -(k1 * x.s + p.k_minus1() + p.k2())}}};
}

bool in_region_D(State x, const RateParams& p, double slack) {
  return x.s >= -slack && x.c >= -slack && x.c <= p.e0() + slack &&
         x.s + x.c <= p.s0() + p.c0() + slack;
}

}  // namespace mmlin
