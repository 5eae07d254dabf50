#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmlin/bounds.hpp"
#include "mmlin/error.hpp"
#include "mmlin/linear.hpp"
#include "mmlin/timescale.hpp"
#include "test_support.hpp"

using namespace mmlin;

TEST_CASE("unit rate constants") {
  const RateParams p(1, 1, 1, 1, 0.1);
  const TimescaleReport r = analyze(p);
  CHECK(r.eta == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  CHECK(r.verdict == SeparationVerdict::Marginal);
  CHECK(to_string(r.verdict) == "marginal");
  CHECK(r.lambda1 == doctest::Approx((-3 + std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(r.lambda2 == doctest::Approx((-3 - std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(r.lambda1_approx == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(r.lambda1_approx - r.lambda1) / std::abs(r.lambda1) ==
        doctest::Approx(0.127).epsilon(0.01));
  CHECK(slow_eigenvalue_approx(p) == r.lambda1_approx);

  const State v = slow_eigenvector_approx(p);
  CHECK(v.s == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(v.c == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.thresholds.eta_sep == 0.1);
  CHECK(r.thresholds.eta_marginal == 0.5);
}

TEST_CASE("equal timescales when K_S -> 0 and K_M = e0") {
  const RateParams p(1, 1e-12, 1, 1, 0.1);
  const TimescaleReport r = analyze(p);
  CHECK(r.eta == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.eta <= 1.0);
  CHECK(r.verdict == SeparationVerdict::NotSeparated);
  CHECK(to_string(r.verdict) == "not-separated");
  CHECK(r.lambda1 == doctest::Approx(r.lambda2).epsilon(1e-4));
  CHECK(r.lambda2 <= r.lambda1);
  CHECK(r.lambda1 < 0.0);
}

TEST_CASE("small e0 separates the timescales") {
  const RateParams p(1, 1, 1, 2e-3, 1e-4);
  const TimescaleReport r = analyze(p);
  CHECK(r.eta == doctest::Approx(4 * 2e-3 / (2.002 * 2.002)).epsilon(1e-14));
  CHECK(r.verdict == SeparationVerdict::WellSeparated);
  CHECK(to_string(r.verdict) == "well-separated");
  CHECK(std::abs(r.lambda1_approx - r.lambda1) / std::abs(r.lambda1) <= 1e-3);
  CHECK(r.eta <= 2e-3);
  CHECK(r.v1_angle <= 1e-3);
  CHECK(r.v1_angle == doctest::Approx(direction_angle(r.v1_exact, r.v1_approx)));
}

TEST_CASE("custom thresholds") {
  const RateParams p(1, 1, 1, 1, 0.1);
  CHECK(analyze(p, {0.5, 0.9}).verdict == SeparationVerdict::WellSeparated);
  CHECK(analyze(p, {0.01, 0.02}).verdict == SeparationVerdict::NotSeparated);
  CHECK(analyze(p, {0.01, 0.02}).thresholds.eta_marginal == 0.02);
  CHECK_THROWS_AS(analyze(p, {0.6, 0.5}), InvalidInput);
  CHECK_THROWS_AS(analyze(p, {0.0, 0.5}), InvalidInput);
}

TEST_CASE("approximation becomes exact as K -> 0") {
  double prev = INFINITY;
  for (double k2 = 1e-2; k2 >= 1e-8; k2 /= 10) {
    const RateParams p(1, 1, k2, 1, 1e-12);
    const TimescaleReport r = analyze(p);
    const double ratio = r.lambda1_approx / r.lambda1;
    CHECK(std::abs(ratio - 1) < prev);
    prev = std::abs(ratio - 1);
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("approximate slow eigenvector is in the open positive quadrant") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 1000; ++n) {
    const RateParams p = testing::random_params(rng, 1e-3, 1e3);
    const State v = slow_eigenvector_approx(p);
    REQUIRE(v.s > 0.0);
    REQUIRE(v.c > 0.0);
  }
}

TEST_CASE("reduced solution") {
  const RateParams p(1, 1, 1, 1, 0.1);
  const State init{0.1, 0.0};
  CHECK(reduced_solution(p, init, 0.0) == init);
  const State x = reduced_solution(p, init, 3.0);
  CHECK(x.s == doctest::Approx(0.1 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(x.c == 0.0);
  const State y = reduced_solution(p, {0.2, 0.4}, 6.0);
  CHECK(y.s == doctest::Approx(0.2 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(y.c == doctest::Approx(0.4 * std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(reduced_solution(p, init, -1.0), InvalidInput);
}

TEST_CASE("reduced s tracks the linear solution after the fast transient") {
  for (double e0 : {1e-3, 3e-4, 1e-4, 1e-5}) {
    const RateParams p(1, 1, 1, e0, 0.1);
    const double eta = separation_index(p);
    REQUIRE(eta <= 1e-3);
    const BiexpSolution sol = mm_linear_solution(p);
    const double t_fast = 10 / sol.A2;
    const double T = horizon(p);
    for (int i = 0; i <= 1000; ++i) {
      const double t = t_fast + (T - t_fast) * i / 1000.0;
      const double gap = std::abs(reduced_solution(p, p.initial_state(), t).s -
                                  evaluate(sol, t).s);
      REQUIRE(gap <= 2 * eta * p.s0());
    }
  }
}

TEST_CASE("discriminant identity and agreement with the generic eigen solver") {
  std::mt19937_64 rng(42);
  for (int n = 0; n < 2000; ++n) {
    const RateParams p = testing::random_params(rng, 1e-2, 1e2);
    const DerivedConstants k = derive_constants(p);
    const double e0 = p.e0();
    const double lhs = (k.K_M + e0) * (k.K_M + e0) - 4 * k.K * e0;
    const double rhs = (k.K_M - e0) * (k.K_M - e0) + 4 * k.K_S * e0;
    // The left side cancels; compare at the scale of its terms.
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (k.K_M + e0) * (k.K_M + e0));

    const double eta = separation_index(p);
    REQUIRE(eta > 0.0);
    REQUIRE(eta <= 1.0);

    const TimescaleReport r = analyze(p);
    const auto [l_slow, l_fast] = testing::eig2x2(-p.k1() * e0, p.k_minus1(),
                                                  p.k1() * e0, -(p.k_minus1() + p.k2()));
    REQUIRE(l_fast.imag() == 0.0);
    REQUIRE(testing::rel_diff(r.lambda2, l_fast.real()) <= 1e-12);
    const EigenPair ep = eigen(mm_linear_triple(p));
    REQUIRE(testing::rel_diff(r.lambda1, ep.lambda1) <= 1e-12);
    REQUIRE(testing::rel_diff(r.lambda2, ep.lambda2) <= 1e-12);
    REQUIRE(r.lambda2 <= r.lambda1);
    REQUIRE(r.lambda1 < 0.0);
    (void)l_slow;
  }
}

TEST_CASE("first-order error law as e0 -> 0") {
  std::vector<double> log_eta, log_err;
  for (double e0 = 0.05; e0 > 1e-5; e0 /= 2) {
    const RateParams p(1, 1, 1, e0, 1e-6);
    const TimescaleReport r = analyze(p);
    log_eta.push_back(std::log(r.eta));
    log_err.push_back(std::log(std::abs(r.lambda1_approx - r.lambda1) / std::abs(r.lambda1)));
  }
  const LineFit f = least_squares_line(log_eta, log_err);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("direction angle") {
  CHECK(direction_angle({1, 0}, {0, 1}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(direction_angle({1, 1}, {-2, -2}) == doctest::Approx(0.0));
  CHECK(direction_angle({1, 0}, {1, 1}) == doctest::Approx(std::numbers::pi / 4));
  CHECK(direction_angle({1, 0}, {-1, 1}) == doctest::Approx(std::numbers::pi / 4));
}
