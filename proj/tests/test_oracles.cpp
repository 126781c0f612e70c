#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chemflow/oracles.hpp"

using namespace chemflow;

TEST_CASE("logistic solution covers the r = 0 and equilibrium limits") {
  REQUIRE(logistic_solution(0.0, 1.0, 1.0, 5.0) == 0.0);
  REQUIRE(logistic_solution(1.0, 0.0, 1.0, 1.0) == Catch::Approx(0.5));
  REQUIRE(logistic_solution(0.5, 1.0, 1.0, 20.0) == Catch::Approx(1.0).margin(1e-8));
  REQUIRE(logistic_solution(2.0, -1.0, 1.0, 50.0) >= 0.0);
}

TEST_CASE("logistic solution satisfies its own ODE") {
  const double h = 1e-6;
  for (const auto& [n0, r, mu] : {std::tuple{0.5, 1.0, 1.0},
                                  std::tuple{2.0, 0.0, 1.0},
                                  std::tuple{1.0, -0.5, 2.0},
                                  std::tuple{0.1, 2.0, 5.0}}) {
    for (double t = 0.1; t < 5.0; t += 0.37) {
      const double y = logistic_solution(n0, r, mu, t);
      const double dy = (logistic_solution(n0, r, mu, t + h) -
                         logistic_solution(n0, r, mu, t - h)) / (2.0 * h);
      const double rhs = r * y - mu * y * y;
      const double scale = std::max({std::abs(dy), std::abs(rhs), 1e-12});
      REQUIRE(std::abs(dy - rhs) / scale <= 1e-6);
    }
  }
}

TEST_CASE("L1 decay bound is tight at t = 0 and strictly decreasing") {
  DerivedConstants c;
  c.gamma = 1.0;  // area 1, mu 1, mass0 1
  REQUIRE(l1_decay_bound(c, 1.0, 1.0, 0.0) == Catch::Approx(1.0));
  REQUIRE(l1_decay_bound(c, 1.0, 1.0, 9.0) == Catch::Approx(0.1));
  double prev = l1_decay_bound(c, 1.0, 1.0, 0.0);
  for (double t = 0.5; t < 20.0; t += 0.5) {
    const double b = l1_decay_bound(c, 1.0, 1.0, t);
    REQUIRE(b < prev);
    prev = b;
  }
}

TEST_CASE("comparison bound reduces to a pure exponential when b = 0") {
  for (double t : {0.0, 0.5, 2.0, 10.0})
    REQUIRE(ode_comparison_bound(3.0, 0.7, 0.0, t, 0.0) ==
            Catch::Approx(3.0 * std::exp(-0.7 * t)));
  REQUIRE(ode_comparison_bound(3.0, 0.7, 1.0, 0.0, 0.0) >= 3.0);
}

TEST_CASE("comparison bound tends to its forced plateau") {
  const double a = 0.5, b = 0.2, y0 = 7.0;
  const double plateau = b / (1.0 - std::exp(-a));
  REQUIRE(ode_comparison_bound(y0, a, b, 100.0 / a, 0.0) ==
          Catch::Approx(plateau).margin(1e-6));
  double prev = ode_comparison_bound(y0, a, 0.0, 0.0, 0.0);
  for (double t = 0.25; t < 30.0; t += 0.25) {
    const double v = ode_comparison_bound(y0, a, 0.0, t, 0.0);
    REQUIRE(v <= prev);
    prev = v;
  }
}

TEST_CASE("comparison bound dominates a brute-force integrated ODE") {
  // y' + a y = h with h piecewise such that every unit window integrates
  // to at most b; integrate with a fine explicit scheme and compare.
  const double a = 0.8, b = 0.3, y0 = 2.0;
  const double dt = 1e-4;
  double y = y0, t = 0.0;
  auto h = [](double s) {
    // bursts of height 1.2 during the first quarter of each unit interval
    const double frac = s - std::floor(s);
    return frac < 0.25 ? 1.2 : 0.0;  // window integral = 0.3 = b
  };
  while (t < 20.0) {
    y += dt * (-a * y + h(t));
    t += dt;
    const double bound = ode_comparison_bound(y0, a, b, t, 0.0);
    REQUIRE(y <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("decay fits recover exact synthetic models") {
  std::vector<TimeSample> exp_series;
  for (double t = 0.0; t <= 20.0; t += 0.1)
    exp_series.push_back({t, 5.0 * std::exp(-0.3 * t)});
  const DecayFit ef = fit_decay(exp_series, DecayModel::exponential, 0.0, 20.0);
  REQUIRE(ef.rate == Catch::Approx(0.3).margin(1e-10));
  REQUIRE(ef.amplitude == Catch::Approx(5.0).margin(1e-9));
  REQUIRE(ef.r_squared == Catch::Approx(1.0).margin(1e-12));

  std::vector<TimeSample> alg_series;
  for (double t = 5.0; t <= 50.0; t += 0.25)
    alg_series.push_back({t, 2.0 / (t + 1.0)});
  const DecayFit af = fit_decay(alg_series, DecayModel::algebraic, 5.0, 50.0);
  REQUIRE(af.rate == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(af.amplitude == Catch::Approx(2.0).margin(1e-9));
  REQUIRE(af.r_squared == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("decay fit handles the degenerate constant series") {
  std::vector<TimeSample> series;
  for (double t = 0.0; t <= 5.0; t += 0.25) series.push_back({t, 4.2});
  const DecayFit fit = fit_decay(series, DecayModel::exponential, 0.0, 5.0);
  REQUIRE(fit.rate == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(fit.r_squared == 1.0);
}

TEST_CASE("decay fit rejects floored and undersampled windows") {
  std::vector<TimeSample> series;
  for (double t = 0.0; t <= 10.0; t += 0.5)
    series.push_back({t, std::max(0.0, 1.0 - 0.2 * t)});
  REQUIRE_THROWS_AS(fit_decay(series, DecayModel::exponential, 0.0, 10.0),
                    std::domain_error);
  std::vector<TimeSample> few = {{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.25}};
  REQUIRE_THROWS_AS(fit_decay(few, DecayModel::exponential, 0.0, 2.0),
                    std::domain_error);
}

TEST_CASE("algebraic sandwich passes 1/(t+1) data and rejects exponentials") {
  std::vector<TimeSample> alg, exp_series;
  for (double t = 5.0; t <= 50.0; t += 0.5) {
    alg.push_back({t, 3.0 / (t + 1.0)});
    exp_series.push_back({t, std::exp(-t)});
  }
  const BoundCheck ok = two_sided_algebraic_check(alg, 5.0, 50.0);
  REQUIRE(ok.pass());
  REQUIRE(ok.worst_violation == 0.0);
  REQUIRE(ok.satisfied_fraction == 1.0);

  const BoundCheck bad = two_sided_algebraic_check(exp_series, 5.0, 50.0);
  REQUIRE_FALSE(bad.pass());

  REQUIRE_THROWS_AS(two_sided_algebraic_check(alg, 100.0, 200.0),
                    std::domain_error);
}
