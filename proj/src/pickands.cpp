#include "parisian/pickands.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "parisian/detail/supinf.hpp"
#include "parisian/normal.hpp"
#include "parisian/rng.hpp"

namespace parisian {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

Estimate summarize(const std::vector<double>& x, const SimConfig& cfg, double M, double eta) {
    Estimate e;
    e.n = x.size();
    e.M = M;
    e.tau = cfg.tau;
    e.eta = eta;
    e.seed = cfg.seed;
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    e.value = mean;
    e.std_error = x.size() > 1
                      ? std::sqrt(ss / (static_cast<double>(x.size()) *
                                        static_cast<double>(x.size() - 1)))
                      : 0.0;
    return e;
}

void check_common(double hurst, const SimConfig& cfg) {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("pickands: hurst must lie in (0,1)");
    if (!(cfg.tau > 0)) throw std::invalid_argument("SimConfig: tau must be positive");
    if (cfg.n == 0) throw std::invalid_argument("SimConfig: n must be positive");
}

std::function<double(double)> ratio_drift(double hurst) {
    const double two_h = 2.0 * hurst;
    return [two_h](double s) { return -std::pow(std::abs(s), two_h); };
}

PathSampler make_sampler(double hurst, std::vector<double> times) {
    return hurst == 0.5 ? PathSampler::bm(std::move(times))
                        : PathSampler::fbm(hurst, std::move(times));
}

}  // namespace

double default_truncation_pickands(double L) {
    if (!(L >= 0)) throw std::invalid_argument("window length must be >= 0");
    return std::max(10.0 * L, 5.0);
}

double exact_F1(double L) {
    if (!(L >= 0)) throw std::invalid_argument("window length must be >= 0");
    if (L == 0) return 1.0;
    const double e4 = std::exp(-L / 4.0);
    const double root = std::sqrt(M_PI * L);
    const double arg = std::sqrt(L / 2.0);
    return (e4 - root * normal_cdf(-arg)) / (e4 + root * normal_cdf(arg));
}

Estimate simulate_pickands(double hurst, double L, const SimConfig& cfg) {
    return pickands_sweep(hurst, {L}, cfg).front();
}

std::vector<Estimate> pickands_sweep(double hurst, const std::vector<double>& Ls,
                                     const SimConfig& cfg) {
    check_common(hurst, cfg);
    if (Ls.empty()) throw std::invalid_argument("pickands_sweep: no window lengths");
    double M = cfg.M;
    if (M <= 0)
        for (double L : Ls) M = std::max(M, default_truncation_pickands(L));
    const double eta = cfg.eta > 0 ? cfg.eta : cfg.tau;

    auto layout = detail::build_supinf_layout(M, cfg.tau, eta, Ls, ratio_drift(hurst));
    std::vector<detail::SupInfJob> jobs(Ls.size());
    for (std::size_t i = 0; i < Ls.size(); ++i) jobs[i] = {i, M, true};
    auto sampler = make_sampler(hurst, layout.times);
    auto res = detail::run_supinf(sampler, layout, jobs, cfg.n, cfg.seed, cfg.threads);

    std::vector<Estimate> out;
    out.reserve(Ls.size());
    std::vector<double> ratios(cfg.n);
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        for (std::size_t r = 0; r < cfg.n; ++r)
            ratios[r] = res.supinf[i][r] / res.denom[i][r];
        Estimate e = summarize(ratios, cfg, M, eta);
        if (sampler.jitter() > 0)
            e.warnings.push_back("covariance factorization needed diagonal jitter");
        out.push_back(std::move(e));
    }
    return out;
}

MStabilityReport pickands_m_stability(double hurst, double L, const std::vector<double>& Ms,
                                      const SimConfig& cfg) {
    check_common(hurst, cfg);
    if (Ms.size() < 2) throw std::invalid_argument("m_stability: need at least two M values");
    std::vector<double> sorted = Ms;
    std::sort(sorted.begin(), sorted.end());
    const double eta = cfg.eta > 0 ? cfg.eta : cfg.tau;

    auto layout =
        detail::build_supinf_layout(sorted.back(), cfg.tau, eta, {L}, ratio_drift(hurst));
    std::vector<detail::SupInfJob> jobs(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) jobs[i] = {0, sorted[i], true};
    auto sampler = make_sampler(hurst, layout.times);
    auto res = detail::run_supinf(sampler, layout, jobs, cfg.n, cfg.seed, cfg.threads);

    MStabilityReport rep;
    rep.Ms = sorted;
    std::vector<std::vector<double>> ratios(sorted.size(), std::vector<double>(cfg.n));
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t r = 0; r < cfg.n; ++r)
            ratios[i][r] = res.supinf[i][r] / res.denom[i][r];
        rep.estimates.push_back(summarize(ratios[i], cfg, sorted[i], eta));
    }
    std::vector<double> diff(cfg.n);
    auto diff_stats = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = 0; r < cfg.n; ++r) diff[r] = ratios[hi][r] - ratios[lo][r];
        Estimate s = summarize(diff, cfg, sorted[hi], eta);
        return std::pair<double, double>{s.value, s.std_error};
    };
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        auto [m, se] = diff_stats(i, i + 1);
        rep.successive_diffs.push_back(std::abs(m));
        rep.diff_ses.push_back(se);
    }
    auto [hm, hse] = diff_stats(0, sorted.size() - 1);
    rep.headline_diff = hm;
    rep.headline_se = hse;
    if (rep.successive_diffs.size() >= 2) {
        const double two_h = 2.0 * hurst;
        const double d0 = rep.successive_diffs.front(), d1 = rep.successive_diffs.back();
        const double x0 = std::pow(sorted[0], two_h);
        const double x1 = std::pow(sorted[sorted.size() - 2], two_h);
        if (d0 > 0 && d1 > 0 && x1 > x0) rep.fitted_decay = std::log(d0 / d1) / (x1 - x0);
    }
    return rep;
}

Estimate estimate_inverse_integral_expectation(double hurst, const SimConfig& cfg) {
    check_common(hurst, cfg);
    const double M = cfg.M > 0 ? cfg.M : 10.0;
    const double eta = cfg.eta > 0 ? cfg.eta : cfg.tau;
    Grid grid = build_grid(-M, M, eta);
    auto sampler = make_sampler(hurst, grid.points);
    const double two_h = 2.0 * hurst;

    std::vector<double> inv(cfg.n);
    const unsigned n_threads = cfg.threads ? cfg.threads : default_threads();
    parallel_blocks(cfg.n, n_threads, [&](std::size_t rep_b, std::size_t rep_e) {
        constexpr std::size_t kBlock = 64;
        const auto rows = static_cast<Eigen::Index>(grid.size());
        Eigen::MatrixXd block(rows, static_cast<Eigen::Index>(std::min(kBlock, rep_e - rep_b)));
        for (std::size_t b = rep_b; b < rep_e; b += kBlock) {
            const std::size_t len = std::min(kBlock, rep_e - b);
            auto cols = block.leftCols(static_cast<Eigen::Index>(len));
            sampler.sample_into(cols, cfg.seed, b);
            for (std::size_t c = 0; c < len; ++c) {
                double sum = 0, first = 0, last = 0;
                for (Eigen::Index i = 0; i < rows; ++i) {
                    const double w = std::exp(kSqrt2 * cols(i, static_cast<Eigen::Index>(c)) -
                                              std::pow(std::abs(grid.points[static_cast<std::size_t>(i)]),
                                                       two_h));
                    sum += w;
                    if (i == 0) first = w;
                    if (i == rows - 1) last = w;
                }
                inv[b + c] = 1.0 / (eta * (sum - 0.5 * (first + last)));
            }
        }
    });
    return summarize(inv, cfg, M, eta);
}

std::vector<double> estimate_sup_cdf(double hurst, const std::vector<double>& thresholds,
                                     const SimConfig& cfg) {
    check_common(hurst, cfg);
    for (double m : thresholds)
        if (!(m > 0)) throw std::invalid_argument("estimate_sup_cdf: thresholds must be positive");
    Grid grid = build_grid(0.0, 1.0, cfg.tau);
    auto sampler = make_sampler(hurst, grid.points);

    std::vector<std::size_t> below(thresholds.size(), 0);
    std::vector<std::vector<std::size_t>> partial;
    const unsigned n_threads = cfg.threads ? cfg.threads : default_threads();
    partial.assign(n_threads ? n_threads : 1, std::vector<std::size_t>(thresholds.size(), 0));
    std::vector<double> maxima(cfg.n);
    parallel_blocks(cfg.n, n_threads, [&](std::size_t rep_b, std::size_t rep_e) {
        constexpr std::size_t kBlock = 64;
        const auto rows = static_cast<Eigen::Index>(grid.size());
        Eigen::MatrixXd block(rows, static_cast<Eigen::Index>(std::min(kBlock, rep_e - rep_b)));
        for (std::size_t b = rep_b; b < rep_e; b += kBlock) {
            const std::size_t len = std::min(kBlock, rep_e - b);
            auto cols = block.leftCols(static_cast<Eigen::Index>(len));
            sampler.sample_into(cols, cfg.seed, b);
            for (std::size_t c = 0; c < len; ++c)
                maxima[b + c] = cols.col(static_cast<Eigen::Index>(c)).maxCoeff();
        }
    });
    for (double m : maxima)
        for (std::size_t k = 0; k < thresholds.size(); ++k)
            if (m < thresholds[k]) ++below[k];
    std::vector<double> probs(thresholds.size());
    for (std::size_t k = 0; k < thresholds.size(); ++k)
        probs[k] = static_cast<double>(below[k]) / static_cast<double>(cfg.n);
    return probs;
}

PickandsLowerBound pickands_lower_bound(double hurst, double L, double inv_integral,
                                        const std::vector<double>& m_grid,
                                        const std::vector<double>& sup_cdf) {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("pickands_lower_bound: hurst must lie in (0,1)");
    if (!(L >= 0)) throw std::invalid_argument("window length must be >= 0");
    if (m_grid.size() != sup_cdf.size() || m_grid.empty())
        throw std::invalid_argument("pickands_lower_bound: m_grid/sup_cdf size mismatch");
    const double two_h = 2.0 * hurst;
    const double lh = std::pow(L, hurst), l2h = std::pow(L, two_h);

    PickandsLowerBound out;
    for (std::size_t k = 0; k < m_grid.size(); ++k) {
        const double candidate =
            inv_integral * std::exp(-l2h) * std::exp(-kSqrt2 * m_grid[k] * lh) * sup_cdf[k];
        if (candidate > out.bound) {
            out.bound = candidate;
            out.best_m = m_grid[k];
        }
    }
    // m = 1/sqrt(2) makes the drift term exp(-L^H); use the nearest grid entry.
    std::size_t nearest = 0;
    for (std::size_t k = 1; k < m_grid.size(); ++k)
        if (std::abs(m_grid[k] - 1.0 / kSqrt2) < std::abs(m_grid[nearest] - 1.0 / kSqrt2))
            nearest = k;
    out.simplified = inv_integral * sup_cdf[nearest] * std::exp(-l2h - lh);
    return out;
}

}  // namespace parisian
