#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "core/oracles.hpp"

using namespace coalflow;
using namespace coalflow::oracles;

TEST_CASE("normal cdf examples") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021049).epsilon(1e-9));
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    CHECK(normal_cdf(-x) == doctest::Approx(1.0 - normal_cdf(x)).epsilon(1e-13));
  }
}

TEST_CASE("adaptive simpson against closed forms") {
  const double one = adaptive_simpson([](double x) { return 3.0 * x * x; },
                                      0.0, 1.0);
  CHECK(one == doctest::Approx(1.0).epsilon(1e-12));
  const double gauss = adaptive_simpson(
      [](double v) { return std::exp(-0.5 * v * v); }, 0.0, 8.0);
  CHECK(gauss == doctest::Approx(std::sqrt(2.0 * M_PI) / 2.0).epsilon(1e-10));
}

TEST_CASE("phi_c: examples and quadrature agreement") {
  CHECK(phi_c(1.3, 0.0) == 0.0);
  CHECK(phi_c(1e-8, 0.5) == doctest::Approx(0.5).epsilon(2e-7));
  CHECK_THROWS_AS(phi_c(0.0, 1.0), std::invalid_argument);
  CHECK(phi_time_change(0.0, 0.7) == 0.7);

  for (double c : {-2.0, -0.5, 0.25, 1.0, 3.0}) {
    for (double t : {0.1, 0.5, 1.0}) {
      const double quad = adaptive_simpson(
          [c](double s) { return std::exp(-2.0 * c * s); }, 0.0, t);
      CHECK(phi_c(c, t) == doctest::Approx(quad).epsilon(1e-10));
    }
  }
  // |phi_C(t) - t| -> 0 uniformly as C -> 0
  for (double t = 0.1; t <= 1.0; t += 0.1) {
    CHECK(std::abs(phi_c(1e-9, t) - t) <= 1e-8);
  }
}

TEST_CASE("meeting survival: limits, quadrature, monotonicity") {
  CHECK(meeting_survival_linear(0.5, 1.0, 1.0, 1.0) == 0.0);
  CHECK(meeting_survival_linear(0.5, 0.0, 0.5, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(meeting_survival_linear(0.5, 0.0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(meeting_survival_linear(0.5, 1.0, 0.0, 1.0),
                  std::invalid_argument);

  // zero-drift branch equals the reflection law
  for (double gap : {0.1, 0.5, 2.0}) {
    for (double t : {0.2, 1.0}) {
      CHECK(meeting_survival_linear(0.0, 0.0, gap, t) ==
            doctest::Approx(1.0 - reflection_meet_cdf(gap, t)).epsilon(1e-13));
    }
  }

  // the erf form vs direct quadrature of the stated integrand
  for (double c : {-1.0, 0.5}) {
    for (double t : {0.25, 1.0}) {
      const double u = 0.5 / std::sqrt(2.0);
      const double upper = u / std::sqrt(phi_time_change(c, t));
      const double quad =
          std::sqrt(2.0 / M_PI) *
          adaptive_simpson([](double v) { return std::exp(-0.5 * v * v); },
                           0.0, upper, {1e-12, 48});
      CHECK(meeting_survival_linear(c, 0.0, 0.5, t) ==
            doctest::Approx(quad).epsilon(1e-10));
    }
  }

  double prev = 2.0;
  for (double t : {0.1, 0.3, 0.6, 1.0}) {
    const double s = meeting_survival_linear(0.7, 0.0, 0.5, t);
    CHECK(s <= prev);
    prev = s;
  }
  prev = -1.0;
  for (double gap : {0.1, 0.3, 0.8, 2.0}) {
    const double s = meeting_survival_linear(0.7, 0.0, gap, 0.5);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("never-meet probability") {
  CHECK(meeting_never_prob_linear(1.0, 0.3, 0.3) == 0.0);
  CHECK(meeting_never_prob_linear(-1.0, 0.0, 0.5) == 0.0);
  CHECK(meeting_never_prob_linear(0.0, 0.0, 0.5) == 0.0);
  double prev = -1.0;
  for (double c : {0.1, 0.5, 2.0, 8.0}) {
    const double v = meeting_never_prob_linear(c, 0.0, 0.5);
    CHECK(v > prev);
    prev = v;
  }
  prev = -1.0;
  for (double gap : {0.1, 0.5, 2.0}) {
    const double v = meeting_never_prob_linear(1.0, 0.0, gap);
    CHECK(v > prev);
    prev = v;
  }
  // survival at large t approaches the never-meet limit
  CHECK(meeting_survival_linear(2.0, 0.0, 0.5, 50.0) ==
        doctest::Approx(meeting_never_prob_linear(2.0, 0.0, 0.5))
            .epsilon(1e-12));
}

TEST_CASE("l defect: examples, dual routes, bounds") {
  CHECK(l_defect(0.7, 0.0) == 0.7);
  CHECK_THROWS_AS(l_defect(0.0, 1.0), std::invalid_argument);
  CHECK(l_defect(1.0, 50.0) <= 1e-12);

  for (double t : {0.2, 0.5, 1.0}) {
    for (double u : {1e-4, 1e-3, 0.1, 0.5, 1.0, 2.0, 4.0}) {
      const double a = l_defect_density_route(t, u);
      const double b = l_defect(t, u);
      CHECK(std::abs(a - b) <= 1e-8);
      CHECK(b <= t + 1e-12);
      CHECK(b <= l_upper_bound(t, u) + 1e-12);
    }
  }
}

TEST_CASE("l upper bound constant") {
  // closed form of the 1-D maximization: s* = 1/6
  const double k_closed = std::exp(-1.5) * std::pow(6.0, 1.5) /
                          (2.0 * std::sqrt(M_PI));
  CHECK(l_bound_constant() == doctest::Approx(k_closed).epsilon(1e-9));
  CHECK(l_bound_constant() == doctest::Approx(0.9251).epsilon(1e-4));
  CHECK_THROWS_AS(l_upper_bound(1.0, 0.0), std::invalid_argument);
  // loose at u -> 0: bound blows up while l -> t
  CHECK(l_upper_bound(1.0, 1e-6) > 1e6);
}

TEST_CASE("expected cluster size: quadrature agreement and asymptotics") {
  for (double c : {-1.0, 0.5, 2.0}) {
    for (double t : {0.01, 0.1, 1.0}) {
      CHECK(std::abs(expected_cluster_size_linear(c, t) -
                     expected_cluster_size_quadrature(c, t)) <= 1e-8);
      const double v = expected_cluster_size_linear(c, t);
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
  CHECK_THROWS_AS(expected_cluster_size_linear(1.0, 0.0),
                  std::invalid_argument);

  // small-t ratio approaches 2/sqrt(pi) (the unit-diffusion pair gap has
  // variance rate 2)
  const double ratio =
      expected_cluster_size_linear(1.0, 1e-6) / std::sqrt(1e-6);
  CHECK(ratio == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-3));

  double prev = 0.0;
  for (double t : {0.01, 0.05, 0.2, 1.0}) {
    const double v = expected_cluster_size_linear(0.5, t);
    CHECK(v >= prev);
    prev = v;
  }
}
