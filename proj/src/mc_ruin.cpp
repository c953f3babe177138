#include "parisian/mc_ruin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "parisian/detail/sliding_min.hpp"
#include "parisian/fbm.hpp"
#include "parisian/rng.hpp"
#include "parisian/stats.hpp"

namespace parisian {

namespace {

std::size_t window_steps(double window, double step) {
    if (!(step > 0)) throw std::invalid_argument("window grid: step must be positive");
    if (!(window >= 0)) throw std::invalid_argument("window grid: window must be >= 0");
    const auto k = static_cast<long long>(std::llround(window / step));
    if (std::abs(window - static_cast<double>(k) * step) >
        1e-9 * std::max(window, step))
        throw std::invalid_argument("window grid: step must divide the window length");
    return static_cast<std::size_t>(k);
}

struct RuinProblem {
    double hurst;
    double T;
    double t_ref;      // location of the dominant variance maximum
    double t_far;      // right-most time that must stay inside the horizon
    std::function<double(double)> barrier;  // u^(1-H) * boundary line(t)
};

RuinEstimate run_ruin(const RuinProblem& prob, double u, const RuinMCConfig& cfg) {
    if (!(u > 0)) throw std::invalid_argument("ruin mc: u must be positive");
    if (cfg.n == 0) throw std::invalid_argument("ruin mc: n must be positive");

    RuinEstimate est;
    est.n = cfg.n;
    est.seed = cfg.seed;
    const double Tu = cfg.schedule == WindowSchedule::ConstantWindow
                          ? prob.T
                          : prob.T * std::pow(u, 2.0 - 1.0 / prob.hurst);
    est.window = Tu / u;

    double step = cfg.step;
    if (step <= 0) {
        step = est.window > 0 ? std::min(est.window / 10.0, prob.t_ref / 50.0)
                              : prob.t_ref / 200.0;
    }
    if (est.window > 0) {
        // Round the step down so it divides the window exactly.
        const double k = std::ceil(est.window / step - 1e-9);
        const double exact = est.window / k;
        if (std::abs(exact - step) > 1e-9 * step && cfg.step > 0)
            est.warnings.push_back("step rounded down to divide the window length");
        step = exact;
    }
    est.step = step;
    est.horizon = cfg.horizon > 0 ? cfg.horizon
                                  : prob.t_far + 3.0 * std::max(1.0, est.window);
    if (est.horizon < est.window + step)
        throw std::invalid_argument("ruin mc: horizon shorter than one window");

    const Grid grid = build_grid(0.0, est.horizon, step);
    const std::size_t m = grid.size();
    const std::size_t k_win = window_steps(est.window, step);
    if (k_win >= m) throw std::invalid_argument("ruin mc: window does not fit the horizon");

    std::vector<double> barrier(m);
    for (std::size_t i = 0; i < m; ++i) barrier[i] = prob.barrier(grid.points[i]);

    auto sampler = prob.hurst == 0.5 ? PathSampler::bm(grid.points)
                                     : PathSampler::fbm(prob.hurst, grid.points);
    if (sampler.jitter() > 0)
        est.warnings.push_back("covariance factorization needed diagonal jitter");

    std::vector<char> ruined(cfg.n, 0);
    const unsigned n_threads = cfg.threads ? cfg.threads : default_threads();
    parallel_blocks(cfg.n, n_threads, [&](std::size_t rep_b, std::size_t rep_e) {
        constexpr std::size_t kBlock = 64;
        Eigen::MatrixXd block(static_cast<Eigen::Index>(m),
                              static_cast<Eigen::Index>(std::min(kBlock, rep_e - rep_b)));
        std::vector<double> excess(m), mins(m);
        detail::SlidingMin slider;
        for (std::size_t b = rep_b; b < rep_e; b += kBlock) {
            const std::size_t len = std::min(kBlock, rep_e - b);
            auto cols = block.leftCols(static_cast<Eigen::Index>(len));
            sampler.sample_into(cols, cfg.seed, b);
            for (std::size_t c = 0; c < len; ++c) {
                bool any_above = false;
                for (std::size_t i = 0; i < m; ++i) {
                    excess[i] = cols(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(c)) - barrier[i];
                    any_above = any_above || excess[i] > 0;
                }
                if (!any_above) continue;  // cannot hold a window above either
                bool hit = false;
                if (k_win == 0) {
                    hit = true;
                } else {
                    slider.run(excess.data(), m, k_win, mins.data());
                    for (std::size_t i = 0; i + k_win < m; ++i)
                        if (mins[i] > 0) { hit = true; break; }
                }
                if (hit) ruined[b + c] = 1;
            }
        }
    });

    for (char r : ruined) est.hits += static_cast<std::size_t>(r);
    est.p_hat = static_cast<double>(est.hits) / static_cast<double>(cfg.n);
    const BinomialCI ci = clopper_pearson(est.hits, cfg.n);
    est.ci_low = ci.low;
    est.ci_high = ci.high;
    est.ci95_half_width = std::max(est.p_hat - ci.low, ci.high - est.p_hat);
    if (est.hits == 0) est.warnings.push_back("no crossings observed; p is below MC resolution");
    if (est.hits == 0 && !std::isnan(cfg.asymptotic_hint) && cfg.asymptotic_hint >= 0 &&
        cfg.asymptotic_hint * static_cast<double>(cfg.n) < 5.0)
        est.warnings.push_back(
            "infeasible at this n: expected crossings below 5 (u too large for direct MC)");
    return est;
}

}  // namespace

bool sup_inf_crossing(const std::vector<double>& values, const std::vector<double>& barrier,
                      double step, double window) {
    if (values.size() != barrier.size() || values.empty())
        throw std::invalid_argument("sup_inf_crossing: size mismatch or empty input");
    const std::size_t m = values.size();
    const std::size_t k = window_steps(window, step);
    if (k >= m) return false;  // no full window fits
    std::vector<double> excess(m), mins(m - k);
    for (std::size_t i = 0; i < m; ++i) excess[i] = values[i] - barrier[i];
    detail::SlidingMin slider;
    slider.run(excess.data(), m, k, mins.data());
    for (double v : mins)
        if (v > 0) return true;
    return false;
}

RuinEstimate simulate_one_dim_parisian(double hurst, double c, double q, double u, double T,
                                       const RuinMCConfig& cfg) {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("ruin mc: hurst must lie in (0,1)");
    if (!(c > 0) || !(q > 0) || !(T >= 0))
        throw std::invalid_argument("ruin mc: need c > 0, q > 0, T >= 0");
    RuinProblem prob;
    prob.hurst = hurst;
    prob.T = T;
    prob.t_ref = hurst * q / ((1.0 - hurst) * c);
    prob.t_far = prob.t_ref;
    const double scale = std::pow(u, 1.0 - hurst);
    prob.barrier = [scale, c, q](double t) { return scale * (q + c * t); };
    return run_ruin(prob, u, cfg);
}

RuinEstimate simulate_two_dim_parisian(const ModelParams& p, double u, const RuinMCConfig& cfg) {
    p.validate();
    const CriticalTimes t = critical_times(p);
    RuinProblem prob;
    prob.hurst = p.hurst;
    prob.T = p.T;
    const Regime regime = classify_regime(p);
    prob.t_ref = regime.dominant == 1 ? t.t1 : (regime.dominant == 2 ? t.t2 : t.t_star);
    prob.t_far = std::max(t.t_star, t.t2);
    const double scale = std::pow(u, 1.0 - p.hurst);
    const double c1 = p.c1, c2 = p.c2, q1 = p.q1, q2 = p.q2;
    prob.barrier = [scale, c1, c2, q1, q2](double time) {
        return scale * std::max(q1 + c1 * time, q2 + c2 * time);
    };
    return run_ruin(prob, u, cfg);
}

}  // namespace parisian
