// Release checklist: ten numerical criteria covering every estimator family,
// the exact formulas, the asymptotic branches and cross-family consistency.
// Every criterion pins its own workload and seed, so a given build either
// passes or fails deterministically.
#include "parisian/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iostream>
#include <ostream>

#include <Eigen/Dense>

#include "parisian/asymptotics.hpp"
#include "parisian/fbm.hpp"
#include "parisian/mc_ruin.hpp"
#include "parisian/model.hpp"
#include "parisian/pickands.hpp"
#include "parisian/piterbarg.hpp"

namespace parisian {

namespace {

std::string strf(const char* fmt, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return buf;
}

// 1. The window-0 Brownian constant has a closed form; the default-settings
//    estimate must land on it within its truncation/discretization budget.
CriterionResult window0_anchor(unsigned threads) {
    CriterionResult r;
    const DriftSpec d{1.0, 1.0};
    SimConfig cfg;
    cfg.tau = 0.005;
    cfg.n = 10000;
    cfg.seed = 1;
    cfg.threads = threads;
    const Estimate e = simulate_piterbarg(d, 0.0, cfg);
    const double exact = piterbarg_closed_form(d);
    const double err = std::abs(e.value - exact);
    const double tol = std::max(0.06 * exact, 4.0 * e.std_error);
    r.passed = err <= tol;
    r.detail = strf("estimate %.10g vs closed form %.10g, |err| %.3g <= tol %.3g (se %.3g)",
                    e.value, exact, err, tol, e.std_error);
    return r;
}

// 2. Every estimate of the drifted constant sits inside its proven envelope
//    (36 drift/window combinations, 3 standard errors of slack).
CriterionResult envelope_containment(unsigned threads) {
    CriterionResult r;
    const std::vector<double> slopes = {1.0, 1.5, 2.0};
    const std::vector<double> Ls = {0.0, 0.5, 1.0, 2.0};
    int inside = 0, total = 0;
    std::string worst;
    for (double a : slopes) {
        for (double b : slopes) {
            const DriftSpec d{a, b};
            SimConfig cfg;
            cfg.tau = 0.01;
            cfg.n = 2000;
            cfg.seed = 2;
            cfg.threads = threads;
            const std::vector<Estimate> ests = piterbarg_sweep(d, Ls, cfg);
            for (std::size_t i = 0; i < Ls.size(); ++i) {
                const auto [lo, hi] = piterbarg_bounds(d, Ls[i]);
                const double slack = 3.0 * ests[i].std_error;
                ++total;
                if (ests[i].value >= lo - slack && ests[i].value <= hi + slack)
                    ++inside;
                else
                    worst = strf(" (a=%g b=%g L=%g: %.6g outside [%.6g, %.6g] +/- %.2g)", a, b,
                                 Ls[i], ests[i].value, lo, hi, slack);
            }
        }
    }
    r.passed = inside == total;
    r.detail = strf("%d/%d estimates inside the proven envelope with 3 se slack%s", inside,
                    total, worst.c_str());
    return r;
}

// 3. At H = 1/2 the window constant is known exactly; the common-path sweep
//    must reproduce it within 10% at every window length.
CriterionResult exact_case_bias(unsigned threads) {
    CriterionResult r;
    const std::vector<double> Ls = {0.0, 0.25, 0.5, 1.0, 2.0};
    SimConfig cfg;
    cfg.tau = 0.005;
    cfg.n = 4000;
    cfg.seed = 3;
    cfg.threads = threads;
    const std::vector<Estimate> ests = pickands_sweep(0.5, Ls, cfg);
    bool ok = true;
    std::string biases;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        const double exact = exact_F1(Ls[i]);
        const double bias = ests[i].value - exact;
        if (std::abs(bias) > std::max(0.1 * exact, 4.0 * ests[i].std_error)) ok = false;
        biases += strf("%s%+.4f@L=%g", i ? ", " : "", bias, Ls[i]);
    }
    r.passed = ok;
    r.detail = "signed bias vs exact (tol max(10%, 4 se)): " + biases;
    return r;
}

// 4. With common random numbers both constants are monotone in the window
//    length, replication by replication, so the estimates must be too.
CriterionResult common_path_monotonicity(unsigned threads) {
    CriterionResult r;
    const std::vector<double> Ls = {0.0, 0.5, 1.0, 1.5, 2.0};
    bool ok = true;
    std::string bad;
    for (double H : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        SimConfig cfg;
        cfg.tau = 0.02;
        cfg.n = 2000;
        cfg.seed = 4;
        cfg.threads = threads;
        const std::vector<Estimate> ests = pickands_sweep(H, Ls, cfg);
        for (std::size_t i = 1; i < ests.size(); ++i)
            if (!(ests[i].value <= ests[i - 1].value)) {
                ok = false;
                bad += strf(" H=%g@L=%g", H, Ls[i]);
            }
        if (!(ests.back().value < ests.front().value)) {
            ok = false;
            bad += strf(" H=%g(flat)", H);
        }
    }
    {
        SimConfig cfg;
        cfg.tau = 0.01;
        cfg.n = 2000;
        cfg.seed = 4;
        cfg.threads = threads;
        const std::vector<Estimate> ests = piterbarg_sweep({1.0, 1.0}, Ls, cfg);
        for (std::size_t i = 1; i < ests.size(); ++i)
            if (!(ests[i].value <= ests[i - 1].value)) {
                ok = false;
                bad += strf(" drifted@L=%g", Ls[i]);
            }
        if (!(ests.back().value < ests.front().value)) {
            ok = false;
            bad += " drifted(flat)";
        }
    }
    r.passed = ok;
    r.detail = ok ? "all 6 common-path sweeps non-increasing in the window length"
                  : "monotonicity violated at:" + bad;
    return r;
}

// 5. Doubling the truncation half-width M moves the estimates by no more than
//    the analytic truncation bound (drifted family) resp. noise (fBm family).
CriterionResult truncation_stability(unsigned threads) {
    CriterionResult r;
    SimConfig cfg;
    cfg.tau = 0.01;
    cfg.n = 2000;
    cfg.threads = threads;

    // "combined se": the two estimates' standard errors added in quadrature
    // (conservative for common paths, and what two independent runs would see).
    const auto combined_se = [](const MStabilityReport& rep) {
        return std::hypot(rep.estimates.front().std_error, rep.estimates.back().std_error);
    };
    bool ok = true;
    double worst_margin = -1e300;
    std::string worst;
    cfg.seed = 51;
    for (double a : {1.0, 1.5, 2.0}) {
        for (double b : {1.0, 1.5, 2.0}) {
            const DriftSpec d{a, b};
            const MStabilityReport rep = piterbarg_m_stability(d, 0.5, {5.0, 10.0}, cfg);
            const double shift = std::abs(rep.headline_diff);
            const double tol = piterbarg_truncation_bound(d, 5.0) + 3.0 * combined_se(rep);
            if (!(shift <= tol)) ok = false;
            if (shift - tol > worst_margin) {
                worst_margin = shift - tol;
                worst = strf("worst drifted a=%g b=%g: M 5->10 shift %.4g <= %.4g", a, b,
                             shift, tol);
            }
        }
    }

    cfg.seed = 52;
    const MStabilityReport pick = pickands_m_stability(0.5, 1.0, {10.0, 20.0}, cfg);
    const double pick_shift = std::abs(pick.headline_diff);
    const double pick_tol = 4.0 * combined_se(pick);
    if (!(pick_shift <= pick_tol)) ok = false;

    r.passed = ok;
    r.detail = strf("%s; fBm M 10->20 shift %.4g <= %.4g", worst.c_str(), pick_shift, pick_tol);
    return r;
}

// 6. For Brownian input the Parisian ruin probability is exact at every u, so
//    direct simulation must agree within 3 binomial confidence intervals.
CriterionResult direct_simulation_cross_check(unsigned threads) {
    CriterionResult r;
    struct Case {
        double c, u, T, step, horizon;
        std::uint64_t seed;
    };
    // The T = 0 case needs the finest grid: pure sup-crossing, so the full
    // discretization bias (~ sqrt(step)) lands on one side of the comparison.
    const std::vector<Case> cases = {
        {1.0, 0.5, 0.2, 0.002, 8.0, 606},
        {1.0, 0.5, 0.0, 0.0001, 8.0, 607},
        {0.5, 1.0, 0.5, 0.002, 12.0, 608},
    };
    bool ok = true;
    std::string detail;
    for (const Case& k : cases) {
        RuinMCConfig cfg;
        cfg.step = k.step;
        cfg.horizon = k.horizon;
        cfg.n = 100000;
        cfg.seed = k.seed;
        cfg.threads = threads;
        const RuinEstimate est = simulate_one_dim_parisian(0.5, k.c, 1.0, k.u, k.T, cfg);
        const double exact = parisian_bm_ruin(k.c, k.u, k.T);
        const double err = std::abs(est.p_hat - exact);
        const double tol = 3.0 * est.ci95_half_width;
        if (!(err <= tol)) ok = false;
        detail += strf("%s(c=%g u=%g T=%g: |%.5f-%.5f|=%.4f vs %.4f)", detail.empty() ? "" : " ",
                       k.c, k.u, k.T, est.p_hat, exact, err, tol);
    }
    // At T = 0 the window formula must collapse to the classical one exactly.
    if (parisian_bm_ruin(1.0, 0.5, 0.0) != classical_bm_ruin(1.0, 0.5)) {
        ok = false;
        detail += " (T=0 formula mismatch)";
    }
    r.passed = ok;
    r.detail = detail;
    return r;
}

// 7. In a one-company-dominates regime the simulated/asymptotic ratio must
//    drift towards 1 as u grows (sample sizes grow with u to keep hits up).
CriterionResult asymptotic_ratio_trend(unsigned threads) {
    CriterionResult r;
    ModelParams p;
    p.c1 = 1.2;
    p.c2 = 1.0;
    p.q1 = 1.0;
    p.q2 = 2.0;
    p.hurst = 0.5;
    p.T = 0.3;
    const std::vector<double> us = {0.5, 0.75, 1.0};
    const std::vector<std::size_t> ns = {200000, 400000, 800000};
    std::vector<double> ratios, ratio_ses;
    std::size_t min_hits = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < us.size(); ++i) {
        RuinMCConfig cfg;
        cfg.step = 0.0025;
        cfg.horizon = 8.0;
        cfg.n = ns[i];
        cfg.seed = 701;
        cfg.threads = threads;
        const RuinEstimate est = simulate_two_dim_parisian(p, us[i], cfg);
        const double asym = parisian_bm_ruin(p.c2, p.q2 * us[i], p.T);
        ratios.push_back(est.p_hat / asym);
        ratio_ses.push_back(est.ci95_half_width / asym);
        min_hits = std::min(min_hits, est.hits);
    }
    bool ok = min_hits >= 10;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        if (!(std::abs(ratios[i] - 1.0) <=
              std::abs(ratios[i - 1] - 1.0) + 3.0 * (ratio_ses[i] + ratio_ses[i - 1])))
            ok = false;
    if (!(ratios.back() >= 0.5 && ratios.back() <= 2.0)) ok = false;
    r.passed = ok;
    r.detail = strf("simulated/asymptotic ratios %.4f, %.4f, %.4f at u = 0.5, 0.75, 1 "
                    "(min hits %zu)",
                    ratios[0], ratios[1], ratios[2], min_hits);
    return r;
}

// 8. Rough interior case with a fixed window: direct estimates must respect
//    the two-sided sandwich, with an envelope constant in (0, 1].
CriterionResult small_h_sandwich(unsigned threads) {
    CriterionResult r;
    ModelParams p;
    p.c1 = 2.0;
    p.c2 = 1.0;
    p.q1 = 1.0;
    p.q2 = 1.2;
    p.hurst = 0.25;
    p.T = 0.5;
    const std::vector<double> us = {0.8, 1.0, 1.25};
    bool ok = true;
    double c_bar_fit = 1.0;
    std::string detail;
    for (double u : us) {
        RuinMCConfig cfg;
        cfg.step = 0.01;
        cfg.horizon = 2.0;
        cfg.n = 60000;
        cfg.seed = 801;
        cfg.threads = threads;
        const RuinEstimate est = simulate_two_dim_parisian(p, u, cfg);
        const SmallHurstBounds sb = small_hurst_bounds(p, u, 1.0);
        if (!(est.p_hat <= sb.upper + 3.0 * est.ci95_half_width)) ok = false;
        if (est.p_hat <= 0.0)
            ok = false;
        else
            c_bar_fit = std::min(c_bar_fit, est.p_hat / sb.lower);
        detail += strf("%su=%g: p=%.3e in [C*%.3e, %.3e]", detail.empty() ? "" : "; ", u,
                       est.p_hat, sb.lower, sb.upper);
    }
    if (!(c_bar_fit > 0.0 && c_bar_fit <= 1.0)) ok = false;
    r.passed = ok;
    r.detail = detail + strf("; fitted envelope constant %.3f", c_bar_fit);
    return r;
}

// 9. The path generator itself: sample covariance within 4 standard errors of
//    the exact covariance entrywise, and the factorization reproduces it.
CriterionResult path_law_validation(unsigned threads) {
    (void)threads;  // single matrix product; thread count does not matter
    CriterionResult r;
    bool ok = true;
    std::string detail;
    int violations = 0;
    double worst_recon = 0;
    std::uint64_t seed = 901;
    for (double H : {0.1, 0.5, 0.9}) {
        std::vector<double> times;
        for (int i = 1; i <= 50; ++i) times.push_back(0.1 * i);
        const Eigen::MatrixXd cov = fbm_covariance(H, times);
        const CholeskyResult chol = cholesky_factor(cov);
        const double recon =
            (chol.factor * chol.factor.transpose() - cov).cwiseAbs().maxCoeff();
        worst_recon = std::max(worst_recon, recon);

        const std::size_t n = 10000;
        PathSampler sampler = PathSampler::fbm(H, times);
        Eigen::MatrixXd paths(static_cast<Eigen::Index>(times.size()),
                              static_cast<Eigen::Index>(n));
        sampler.sample_into(paths, seed++, 0);
        const Eigen::MatrixXd sample_cov =
            (paths * paths.transpose()) / static_cast<double>(n);
        for (Eigen::Index i = 0; i < cov.rows(); ++i)
            for (Eigen::Index j = 0; j <= i; ++j) {
                const double se =
                    std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) /
                              static_cast<double>(n));
                if (std::abs(sample_cov(i, j) - cov(i, j)) > 4.0 * se) ++violations;
            }
    }
    if (violations > 0) ok = false;
    if (!(worst_recon <= 1e-8)) ok = false;
    r.passed = ok;
    r.detail = strf("3x1275 covariance entries within 4 se (%d outside), factor "
                    "reconstruction error %.2e <= 1e-8",
                    violations, worst_recon);
    return r;
}

// 10. Bit-for-bit reproducibility: every estimator family returns identical
//     numbers when rerun and when the thread count changes.
CriterionResult determinism(unsigned threads) {
    (void)threads;  // this criterion varies the thread count itself
    CriterionResult r;
    bool ok = true;
    std::string bad;
    const auto check = [&](const char* what, const std::function<std::pair<double, double>(
                                                 unsigned)>& run) {
        const auto [v1, s1] = run(1);
        const auto [v4, s4] = run(4);
        const auto [v1b, s1b] = run(1);
        if (v1 != v4 || s1 != s4 || v1 != v1b || s1 != s1b) {
            ok = false;
            bad += strf(" %s", what);
        }
    };
    check("drifted-constant", [](unsigned th) {
        SimConfig cfg;
        cfg.tau = 0.02;
        cfg.n = 500;
        cfg.seed = 10;
        cfg.threads = th;
        const Estimate e = simulate_piterbarg({1.0, 1.0}, 0.5, cfg);
        return std::pair{e.value, e.std_error};
    });
    check("window-constant", [](unsigned th) {
        SimConfig cfg;
        cfg.tau = 0.02;
        cfg.n = 500;
        cfg.seed = 10;
        cfg.threads = th;
        const Estimate e = simulate_pickands(0.7, 0.5, cfg);
        return std::pair{e.value, e.std_error};
    });
    check("inverse-integral", [](unsigned th) {
        SimConfig cfg;
        cfg.tau = 0.05;
        cfg.eta = 0.05;
        cfg.n = 500;
        cfg.seed = 10;
        cfg.threads = th;
        const Estimate e = estimate_inverse_integral_expectation(0.3, cfg);
        return std::pair{e.value, e.std_error};
    });
    check("sup-cdf", [](unsigned th) {
        SimConfig cfg;
        cfg.tau = 0.02;
        cfg.n = 500;
        cfg.seed = 10;
        cfg.threads = th;
        const std::vector<double> c = estimate_sup_cdf(0.3, {0.5, 1.0}, cfg);
        return std::pair{c[0], c[1]};
    });
    check("one-dim-ruin", [](unsigned th) {
        RuinMCConfig cfg;
        cfg.step = 0.01;
        cfg.horizon = 4.0;
        cfg.n = 500;
        cfg.seed = 10;
        cfg.threads = th;
        const RuinEstimate e = simulate_one_dim_parisian(0.5, 1.0, 1.0, 1.0, 0.1, cfg);
        return std::pair{e.p_hat, e.ci95_half_width};
    });
    check("two-dim-ruin", [](unsigned th) {
        ModelParams p;
        p.c1 = 2.0;
        p.c2 = 1.0;
        p.q1 = 1.0;
        p.q2 = 2.0;
        p.hurst = 0.7;
        p.T = 0.1;
        RuinMCConfig cfg;
        cfg.step = 0.02;
        cfg.horizon = 2.0;
        cfg.n = 500;
        cfg.seed = 10;
        cfg.threads = th;
        const RuinEstimate e = simulate_two_dim_parisian(p, 1.0, cfg);
        return std::pair{e.p_hat, e.ci95_half_width};
    });
    r.passed = ok;
    r.detail = ok ? "6 estimator families bit-identical across reruns and 1 vs 4 threads"
                  : "results changed for:" + bad;
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    struct Entry {
        int id;
        const char* name;
        CriterionResult (*fn)(unsigned);
    };
    const Entry entries[] = {
        {1, "window-0 closed-form anchor", window0_anchor},
        {2, "envelope containment", envelope_containment},
        {3, "exact-case bias", exact_case_bias},
        {4, "common-path monotonicity", common_path_monotonicity},
        {5, "truncation stability", truncation_stability},
        {6, "direct-simulation cross-check", direct_simulation_cross_check},
        {7, "asymptotic ratio trend", asymptotic_ratio_trend},
        {8, "small-H sandwich", small_h_sandwich},
        {9, "path-law validation", path_law_validation},
        {10, "determinism", determinism},
    };
    std::vector<CriterionResult> results;
    for (const Entry& e : entries) {
        if (opt.verbose)
            std::cerr << "[acceptance] criterion " << e.id << "/10: " << e.name << "...\n";
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = e.fn(opt.threads);
        } catch (const std::exception& ex) {
            r.passed = false;
            r.detail = strf("exception: %s", ex.what());
        }
        r.id = e.id;
        r.name = e.name;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.verbose)
            std::cerr << "[acceptance]   " << (r.passed ? "PASS" : "FAIL") << " ("
                      << strf("%.1f", r.seconds) << " s)\n";
        results.push_back(std::move(r));
    }
    return results;
}

void print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        os << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name
           << "): " << r.detail << " [" << strf("%.1f", r.seconds) << " s]\n";
}

}  // namespace parisian
