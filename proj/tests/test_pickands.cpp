#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "parisian/normal.hpp"
#include "parisian/pickands.hpp"

using namespace parisian;

TEST_CASE("default truncation half-width") {
    CHECK(default_truncation_pickands(0.0) == doctest::Approx(5.0));
    CHECK(default_truncation_pickands(0.3) == doctest::Approx(5.0));
    CHECK(default_truncation_pickands(1.0) == doctest::Approx(10.0));
    CHECK(default_truncation_pickands(2.5) == doctest::Approx(25.0));
}

TEST_CASE("exact Brownian window constant") {
    CHECK(exact_F1(0.0) == 1.0);
    CHECK(exact_F1(0.25) == doctest::Approx(0.4111333454).epsilon(1e-9));
    CHECK(exact_F1(0.5) == doctest::Approx(0.2834587751).epsilon(1e-9));
    CHECK(exact_F1(1.0) == doctest::Approx(0.1664174452).epsilon(1e-9));
    CHECK(exact_F1(2.0) == doctest::Approx(0.0769078563).epsilon(1e-9));

    // Independent inline evaluation of the same closed form.
    auto reference = [](double L) {
        const double e = std::exp(-L / 4.0);
        const double root = std::sqrt(std::numbers::pi * L);
        return (e - root * normal_cdf(-std::sqrt(L / 2.0))) /
               (e + root * normal_cdf(std::sqrt(L / 2.0)));
    };
    for (double L : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0})
        CHECK(exact_F1(L) == doctest::Approx(reference(L)).epsilon(1e-12));

    double prev = 1.0;
    for (double L = 0.1; L <= 4.0; L += 0.1) {
        CHECK(exact_F1(L) < prev);
        prev = exact_F1(L);
    }
    CHECK(exact_F1(50.0) < 1e-5);
    CHECK(exact_F1(50.0) > 0.0);
}

TEST_CASE("ratio estimator tracks the exact Brownian values") {
    SimConfig cfg;
    cfg.tau = 0.005;
    cfg.n = 4000;
    cfg.seed = 3;
    const std::vector<double> Ls = {0.0, 0.25, 0.5, 1.0, 2.0};
    const auto sweep = pickands_sweep(0.5, Ls, cfg);
    REQUIRE(sweep.size() == Ls.size());
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        const double exact = exact_F1(Ls[i]);
        const double tol = std::max(0.1 * exact, 4 * sweep[i].std_error);
        CAPTURE(Ls[i]);
        CHECK(std::abs(sweep[i].value - exact) <= tol);
    }
    // The grid-sup ratio overshoots for positive windows (inner inf over a
    // window loses less than the sup) and undershoots at window 0.
    CHECK(sweep[0].value < exact_F1(0.0));
    CHECK(sweep[3].value > exact_F1(1.0));
}

TEST_CASE("common random numbers make the sweep exactly monotone") {
    SimConfig cfg;
    cfg.tau = 0.02;
    cfg.n = 300;
    cfg.seed = 15;
    for (double hurst : {0.5, 0.3}) {
        const auto sweep = pickands_sweep(hurst, {0.0, 0.5, 1.0}, cfg);
        CAPTURE(hurst);
        for (std::size_t i = 1; i < sweep.size(); ++i)
            CHECK(sweep[i].value <= sweep[i - 1].value);
        for (const auto& e : sweep) CHECK(e.M == sweep[0].M);
    }
}

TEST_CASE("inverse integral expectation at the Brownian point") {
    SimConfig cfg;
    cfg.tau = 0.01;
    cfg.eta = 0.01;
    cfg.n = 20000;
    cfg.seed = 404;
    cfg.M = 10;
    const Estimate e = estimate_inverse_integral_expectation(0.5, cfg);
    // The integral of e^{sqrt(2) B(s) - |s|} over the line has expected
    // reciprocal exactly 1/3; the grid trapezoid shows a small upward bias.
    CHECK(std::abs(e.value - 1.0 / 3.0) <= 0.012);
    CHECK(e.value == doctest::Approx(0.33882429000496056).epsilon(1e-12));
    CHECK(e.std_error == doctest::Approx(0.002151163125123097).epsilon(1e-9));
    CHECK(e.M == 10.0);
    CHECK(e.eta == 0.01);

    SimConfig defaulted;
    defaulted.n = 50;
    defaulted.tau = 0.05;
    defaulted.seed = 1;
    CHECK(estimate_inverse_integral_expectation(0.5, defaulted).M == 10.0);
}

TEST_CASE("sup cdf matches the reflection principle") {
    SimConfig cfg;
    cfg.tau = 0.002;
    cfg.n = 5000;
    cfg.seed = 12;
    const std::vector<double> ms = {0.5, 1.0, 2.0};
    const auto probs = estimate_sup_cdf(0.5, ms, cfg);
    REQUIRE(probs.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const double exact = 1.0 - 2.0 * normal_tail(ms[k]);
        CAPTURE(ms[k]);
        CHECK(probs[k] >= 0.0);
        CHECK(probs[k] <= 1.0);
        // Grid suprema undershoot, so the estimated cdf sits slightly above.
        CHECK(std::abs(probs[k] - exact) <= 0.035);
        CHECK(probs[k] >= exact - 0.01);
    }
    CHECK(probs[0] < probs[1]);
    CHECK(probs[1] < probs[2]);
}

TEST_CASE("lower bound assembly picks the best grid point") {
    const std::vector<double> m_grid = {0.5, 1.0 / std::sqrt(2.0), 1.0};
    const std::vector<double> cdf = {0.3, 0.45, 0.9};
    const double inv = 0.34;
    const double hurst = 0.4, L = 1.5;
    const double lh = std::pow(L, hurst), l2h = std::pow(L, 2 * hurst);
    const PickandsLowerBound b = pickands_lower_bound(hurst, L, inv, m_grid, cdf);
    double best = 0, best_m = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double cand =
            inv * std::exp(-l2h) * std::exp(-std::sqrt(2.0) * m_grid[k] * lh) * cdf[k];
        if (cand > best) {
            best = cand;
            best_m = m_grid[k];
        }
    }
    CHECK(b.bound == doctest::Approx(best).epsilon(1e-14));
    CHECK(b.best_m == best_m);
    CHECK(b.simplified == doctest::Approx(inv * 0.45 * std::exp(-l2h - lh)).epsilon(1e-14));
    CHECK(b.bound > b.simplified);
    CHECK_THROWS_AS(pickands_lower_bound(0.4, 1.0, inv, m_grid, {0.3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(pickands_lower_bound(1.4, 1.0, inv, m_grid, cdf),
                    std::invalid_argument);
    CHECK_THROWS_AS(pickands_lower_bound(0.4, -1.0, inv, m_grid, cdf),
                    std::invalid_argument);
}

TEST_CASE("simulated estimate dominates the provable lower bound") {
    const std::vector<double> m_grid = {0.25, 0.5, 1.0 / std::sqrt(2.0), 1.0, 1.25};
    for (double hurst : {0.3, 0.7}) {
        SimConfig cfg;
        cfg.tau = 0.02;
        cfg.n = 1500;
        cfg.seed = 6;
        const Estimate est = simulate_pickands(hurst, 1.0, cfg);

        SimConfig ing = cfg;
        ing.eta = 0.02;
        const Estimate inv = estimate_inverse_integral_expectation(hurst, ing);
        const auto cdf = estimate_sup_cdf(hurst, m_grid, ing);
        const PickandsLowerBound lb =
            pickands_lower_bound(hurst, 1.0, inv.value, m_grid, cdf);
        CAPTURE(hurst);
        CHECK(lb.bound > 0.0);
        CHECK(est.value + 3 * est.std_error >= lb.bound);
        // Equality up to rounding when the best grid point is 1/sqrt(2) itself.
        CHECK(lb.bound >= lb.simplified * (1 - 1e-12));
    }
}

TEST_CASE("truncation error settles as the half-width grows") {
    SimConfig cfg;
    cfg.tau = 0.01;
    cfg.n = 2000;
    cfg.seed = 31;
    const MStabilityReport rep = pickands_m_stability(0.5, 0.5, {5.0, 10.0, 15.0}, cfg);
    REQUIRE(rep.estimates.size() == 3);
    REQUIRE(rep.successive_diffs.size() == 2);
    REQUIRE(rep.diff_ses.size() == 2);
    // The 5 -> 10 shift carries real truncation bias; 10 -> 15 is noise-level.
    CHECK(rep.successive_diffs[0] >= rep.successive_diffs[1]);
    CHECK(rep.successive_diffs[1] <= 4 * rep.diff_ses[1] + 0.01);
    CHECK(rep.headline_diff ==
          doctest::Approx(rep.estimates.back().value - rep.estimates.front().value)
              .epsilon(1e-9));
    CHECK(std::abs(rep.headline_diff) <=
          rep.successive_diffs[0] + rep.successive_diffs[1] + 1e-12);
    for (const auto& e : rep.estimates) CHECK(e.value > 0.0);
}

TEST_CASE("deterministic and thread-count invariant") {
    SimConfig cfg;
    cfg.tau = 0.05;
    cfg.n = 200;
    cfg.seed = 77;
    cfg.threads = 1;
    const Estimate one = simulate_pickands(0.3, 0.5, cfg);
    cfg.threads = 4;
    const Estimate four = simulate_pickands(0.3, 0.5, cfg);
    CHECK(one.value == four.value);
    CHECK(one.std_error == four.std_error);
}

TEST_CASE("input validation") {
    SimConfig cfg;
    cfg.n = 10;
    CHECK_THROWS_AS(simulate_pickands(0.0, 0.5, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_pickands(1.0, 0.5, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_pickands(0.5, -0.5, cfg), std::invalid_argument);
    CHECK_THROWS_AS(estimate_sup_cdf(0.5, {0.5, 0.0}, cfg), std::invalid_argument);
}
