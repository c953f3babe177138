#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "parisian/asymptotics.hpp"
#include "parisian/fbm.hpp"
#include "parisian/mc_ruin.hpp"

using namespace parisian;

namespace {

bool has_warning(const RuinEstimate& e, const std::string& needle) {
    for (const auto& w : e.warnings)
        if (w.find(needle) != std::string::npos) return true;
    return false;
}

// Reference implementation: some k+1 consecutive points all strictly above.
bool naive_crossing(const std::vector<double>& v, const std::vector<double>& b, std::size_t k) {
    const std::size_t m = v.size();
    if (k >= m) return false;
    for (std::size_t i = 0; i + k < m; ++i) {
        bool all_above = true;
        for (std::size_t j = i; j <= i + k; ++j)
            if (!(v[j] > b[j])) {
                all_above = false;
                break;
            }
        if (all_above) return true;
    }
    return false;
}

ModelParams params(double c1, double c2, double q1, double q2, double hurst, double T) {
    ModelParams p;
    p.c1 = c1;
    p.c2 = c2;
    p.q1 = q1;
    p.q2 = q2;
    p.hurst = hurst;
    p.T = T;
    return p;
}

}  // namespace

TEST_CASE("window crossing detector: hand cases") {
    const std::vector<double> v = {0.0, 1.0, 1.0, 1.0, 0.0};
    const std::vector<double> b(5, 0.5);
    CHECK(sup_inf_crossing(v, b, 1.0, 0.0));
    CHECK(sup_inf_crossing(v, b, 1.0, 2.0));
    CHECK_FALSE(sup_inf_crossing(v, b, 1.0, 3.0));
    CHECK_FALSE(sup_inf_crossing(v, b, 1.0, 5.0));  // window longer than the grid

    // Touching the barrier does not count: the stretch must be strictly above.
    CHECK_FALSE(sup_inf_crossing({1.0, 1.0}, {1.0, 1.0}, 1.0, 1.0));
    CHECK(sup_inf_crossing({1.0 + 1e-12, 1.0 + 1e-12}, {1.0, 1.0}, 1.0, 1.0));

    const std::vector<double> below = {-1.0, -2.0, -0.5};
    CHECK_FALSE(sup_inf_crossing(below, {0.0, 0.0, 0.0}, 1.0, 0.0));

    CHECK_THROWS_AS(sup_inf_crossing(v, {0.5, 0.5}, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sup_inf_crossing({}, {}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sup_inf_crossing(v, b, 0.1, 0.35), std::invalid_argument);
    CHECK_THROWS_AS(sup_inf_crossing(v, b, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sup_inf_crossing(v, b, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("window crossing detector: randomized against brute force") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> msize(1, 40);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = static_cast<std::size_t>(msize(rng));
        std::uniform_int_distribution<std::size_t> kdist(0, m + 1);
        const std::size_t k = kdist(rng);
        std::vector<double> v(m), b(m);
        for (std::size_t i = 0; i < m; ++i) {
            v[i] = val(rng);
            b[i] = 0.4 * val(rng);
        }
        CAPTURE(trial);
        CHECK(sup_inf_crossing(v, b, 0.5, 0.5 * static_cast<double>(k)) ==
              naive_crossing(v, b, k));
    }
}

TEST_CASE("tiny capital means near-certain crossing") {
    RuinMCConfig cfg;
    cfg.n = 2000;
    cfg.seed = 5;
    const RuinEstimate est = simulate_one_dim_parisian(0.5, 1.0, 1.0, 0.01, 0.0, cfg);
    CHECK(est.p_hat > 0.9);
    CHECK(est.hits > 1800);
}

TEST_CASE("Brownian zero-window simulation matches the classical formula") {
    RuinMCConfig cfg;
    cfg.n = 20000;
    cfg.seed = 606;
    cfg.step = 0.00025;
    cfg.horizon = 7.0;
    const RuinEstimate est = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.0, cfg);
    const double exact = classical_bm_ruin(1.0, 1.0);
    CHECK(est.ci_low <= est.p_hat);
    CHECK(est.p_hat <= est.ci_high);
    CHECK(std::abs(est.p_hat - exact) <= 3 * est.ci95_half_width);

    // A short minimal excursion removes some crossings on the same paths.
    RuinMCConfig cfgT = cfg;
    const RuinEstimate estT = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.005, cfgT);
    CHECK(estT.p_hat <= est.p_hat);
    const double gap_exact = parisian_bm_ruin(1.0, 1.0, 0.0) - parisian_bm_ruin(1.0, 1.0, 0.005);
    CHECK(std::abs((est.p_hat - estT.p_hat) - gap_exact) <= 0.010);
}

TEST_CASE("joint ruin is rarer than either single ruin on the same paths") {
    RuinMCConfig cfg;
    cfg.n = 5000;
    cfg.seed = 88;
    cfg.step = 0.002;
    cfg.horizon = 8.0;
    const ModelParams p = params(2.0, 1.0, 1.0, 2.0, 0.5, 0.2);
    const double u = 0.8;
    const RuinEstimate both = simulate_two_dim_parisian(p, u, cfg);
    const RuinEstimate first = simulate_one_dim_parisian(0.5, 2.0, 1.0, u, 0.2, cfg);
    const RuinEstimate second = simulate_one_dim_parisian(0.5, 1.0, 2.0, u, 0.2, cfg);
    CHECK(both.p_hat <= first.p_hat);
    CHECK(both.p_hat <= second.p_hat);
    CHECK(both.p_hat > 0.0);
}

TEST_CASE("exactly monotone in capital and in excursion length under common paths") {
    RuinMCConfig cfg;
    cfg.n = 5000;
    cfg.seed = 17;
    cfg.step = 0.001;
    cfg.horizon = 6.0;
    double prev = 1.0;
    for (double u : {0.5, 1.0, 1.5}) {
        const RuinEstimate est = simulate_one_dim_parisian(0.5, 1.0, 1.0, u, 0.0, cfg);
        CHECK(est.p_hat <= prev);
        prev = est.p_hat;
    }

    cfg.step = 0.0025;
    prev = 1.0;
    for (double T : {0.0, 0.1, 0.2}) {
        const RuinEstimate est = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, T, cfg);
        CHECK(est.p_hat <= prev);
        prev = est.p_hat;
    }
}

TEST_CASE("parameter scaling that preserves the rescaled problem is exact") {
    RuinMCConfig cfg;
    cfg.n = 2000;
    cfg.seed = 42;
    cfg.step = 0.002;
    cfg.horizon = 5.0;
    // (c, q, u, T) and (2c, 2q, u/4, T/4) share barrier, window and paths.
    const RuinEstimate a = simulate_one_dim_parisian(0.5, 1.0, 1.0, 4.0, 0.8, cfg);
    const RuinEstimate b = simulate_one_dim_parisian(0.5, 2.0, 2.0, 1.0, 0.2, cfg);
    CHECK(a.window == b.window);
    CHECK(a.hits == b.hits);
    CHECK(a.p_hat == b.p_hat);
}

TEST_CASE("pinned two-company fixture") {
    RuinMCConfig cfg;
    cfg.n = 100000;
    cfg.seed = 909;
    const ModelParams p = params(2.0, 1.0, 1.0, 2.0, 0.5, 0.5);
    const RuinEstimate est = simulate_two_dim_parisian(p, 1.5, cfg);
    CHECK(est.p_hat == 5e-05);
    CHECK(est.hits == 5);
    CHECK(est.n == 100000);
    CHECK(est.window == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(est.step == doctest::Approx(0.019607843137254902).epsilon(1e-15));
    CHECK(est.horizon == 5.0);
    CHECK(est.seed == 909);
    CHECK(est.ci_low == doctest::Approx(1.6235056815361304e-05).epsilon(1e-12));
    CHECK(est.ci_high == doctest::Approx(0.00011667943042326101).epsilon(1e-12));
}

TEST_CASE("refining the grid can only find more zero-window crossings") {
    const Grid coarse = build_grid(0.0, 4.0, 0.01);
    const PathBatch batch = sample_bm_paths(coarse, 200, 7);
    const PathBatch fine = refine_bm_paths(batch, 99);

    auto count = [](const PathBatch& pb) {
        std::vector<double> barrier(pb.grid.size());
        for (std::size_t i = 0; i < barrier.size(); ++i)
            barrier[i] = 1.0 + pb.grid.points[i];
        std::size_t hits = 0;
        for (Eigen::Index j = 0; j < pb.values.cols(); ++j) {
            const double* col = pb.values.col(j).data();
            std::vector<double> path(col, col + pb.values.rows());
            if (sup_inf_crossing(path, barrier, pb.grid.step, 0.0)) ++hits;
        }
        return hits;
    };
    const std::size_t coarse_hits = count(batch);
    const std::size_t fine_hits = count(fine);
    CHECK(coarse_hits > 0);
    CHECK(fine_hits >= coarse_hits);
    CHECK(fine_hits < 200);
}

TEST_CASE("step warning when a user step cannot tile the window") {
    RuinMCConfig cfg;
    cfg.n = 100;
    cfg.seed = 1;
    cfg.step = 0.003;
    cfg.horizon = 5.0;
    const RuinEstimate est = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.5, cfg);
    CHECK(has_warning(est, "step rounded down"));
    CHECK(est.step == doctest::Approx(0.5 / 167.0).epsilon(1e-15));

    RuinMCConfig clean = cfg;
    clean.step = 0.0025;
    const RuinEstimate ok = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.5, clean);
    CHECK_FALSE(has_warning(ok, "step rounded down"));
    CHECK(ok.step == 0.0025);
}

TEST_CASE("rare-event warnings at infeasible capital") {
    RuinMCConfig cfg;
    cfg.n = 200;
    cfg.seed = 3;
    const RuinEstimate plain = simulate_one_dim_parisian(0.5, 1.0, 1.0, 6.0, 0.0, cfg);
    CHECK(plain.hits == 0);
    CHECK(plain.p_hat == 0.0);
    CHECK(plain.ci_low == 0.0);
    CHECK(plain.ci_high > 0.0);
    CHECK(has_warning(plain, "no crossings observed"));
    CHECK_FALSE(has_warning(plain, "infeasible at this n"));

    RuinMCConfig hinted = cfg;
    hinted.asymptotic_hint = classical_bm_ruin(1.0, 6.0);  // e^{-12}: hopeless at n = 200
    const RuinEstimate hint = simulate_one_dim_parisian(0.5, 1.0, 1.0, 6.0, 0.0, hinted);
    CHECK(has_warning(hint, "no crossings observed"));
    CHECK(has_warning(hint, "infeasible at this n"));
}

TEST_CASE("window schedules coincide for the Brownian driver") {
    RuinMCConfig cfg;
    cfg.n = 500;
    cfg.seed = 21;
    cfg.step = 0.003;
    cfg.horizon = 5.0;
    const RuinEstimate cw = simulate_one_dim_parisian(0.5, 1.0, 1.0, 2.0, 0.3, cfg);
    RuinMCConfig scfg = cfg;
    scfg.schedule = WindowSchedule::ScaledWindow;
    const RuinEstimate sw = simulate_one_dim_parisian(0.5, 1.0, 1.0, 2.0, 0.3, scfg);
    CHECK(cw.window == sw.window);
    CHECK(cw.hits == sw.hits);
    CHECK(cw.p_hat == sw.p_hat);
}

TEST_CASE("scaled schedule shrinks the window with capital for rough paths") {
    RuinMCConfig cfg;
    cfg.n = 200;
    cfg.seed = 8;
    cfg.step = 0.0025;
    cfg.horizon = 0.8;
    cfg.schedule = WindowSchedule::ScaledWindow;
    const RuinEstimate est = simulate_one_dim_parisian(0.25, 1.0, 1.0, 2.0, 0.1, cfg);
    // T_u = T u^(2 - 1/H) = 0.1 / 4; rescaled window = T_u / u = 0.0125.
    CHECK(est.window == 0.0125);
    CHECK(est.p_hat >= 0.0);
    CHECK(est.p_hat <= 1.0);

    RuinMCConfig ccfg = cfg;
    ccfg.schedule = WindowSchedule::ConstantWindow;
    const RuinEstimate cw = simulate_one_dim_parisian(0.25, 1.0, 1.0, 2.0, 0.1, ccfg);
    CHECK(cw.window == 0.05);
}

TEST_CASE("input validation") {
    RuinMCConfig cfg;
    cfg.n = 100;
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.0, 1, 1, 1, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_one_dim_parisian(1.0, 1, 1, 1, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.5, 0, 1, 1, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.5, 1, 0, 1, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.5, 1, 1, 0, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.5, 1, 1, 1, -1, cfg), std::invalid_argument);

    RuinMCConfig zero = cfg;
    zero.n = 0;
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.5, 1, 1, 1, 0, zero), std::invalid_argument);

    RuinMCConfig tight = cfg;
    tight.horizon = 0.1;
    CHECK_THROWS_AS(simulate_one_dim_parisian(0.5, 1, 1, 1, 0.5, tight), std::invalid_argument);

    CHECK_THROWS_AS(simulate_two_dim_parisian(params(1, 1, 1, 2, 0.5, 0), 1.0, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_two_dim_parisian(params(2, 1, 1, 2, 0.5, 0), 0.0, cfg),
                    std::invalid_argument);
}

TEST_CASE("thread-count invariance") {
    RuinMCConfig cfg;
    cfg.n = 400;
    cfg.seed = 13;
    cfg.step = 0.005;
    cfg.horizon = 5.0;
    cfg.threads = 1;
    const RuinEstimate one = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.2, cfg);
    cfg.threads = 4;
    const RuinEstimate four = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.2, cfg);
    CHECK(one.hits == four.hits);
    CHECK(one.p_hat == four.p_hat);
}
