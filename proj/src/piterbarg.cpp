#include "parisian/piterbarg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parisian/detail/supinf.hpp"
#include "parisian/normal.hpp"

namespace parisian {

namespace {

// Mean and standard error of a per-replication vector, summed in replication
// order so the result is independent of the thread count.
Estimate summarize(const std::vector<double>& x, const SimConfig& cfg, double M) {
    Estimate e;
    e.n = x.size();
    e.M = M;
    e.tau = cfg.tau;
    e.eta = cfg.eta;
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

std::function<double(double)> drift_fn(const DriftSpec& d) {
    const double up = 1.0 + d.b, dn = 1.0 + d.a;  // -|s| + h(s) combined
    return [up, dn](double s) { return s < 0 ? up * s : -dn * s; };
}

void check_cfg(const SimConfig& cfg) {
    if (!(cfg.tau > 0)) throw std::invalid_argument("SimConfig: tau must be positive");
    if (cfg.n == 0) throw std::invalid_argument("SimConfig: n must be positive");
}

}  // namespace

void DriftSpec::validate() const {
    if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("DriftSpec: slopes must be positive and finite");
}

double default_truncation_piterbarg(const DriftSpec& d, double L) {
    d.validate();
    if (!(L >= 0)) throw std::invalid_argument("window length must be >= 0");
    const double m = std::min(d.a, d.b);
    return (7.0 + L * (3.0 + m)) / m;
}

double piterbarg_closed_form(const DriftSpec& d) {
    d.validate();
    return 1.0 + 1.0 / d.a + 1.0 / d.b - 1.0 / (d.a + d.b + 1.0);
}

std::pair<double, double> piterbarg_bounds(const DriftSpec& d, double L) {
    d.validate();
    if (!(L >= 0)) throw std::invalid_argument("window length must be >= 0");
    const double lower = 2.0 * std::exp(-L * std::min(d.a, d.b)) * normal_tail(std::sqrt(2.0 * L));
    return {lower, piterbarg_closed_form(d)};
}

double piterbarg_truncation_bound(const DriftSpec& d, double M) {
    d.validate();
    if (!(M >= 0)) throw std::invalid_argument("M must be >= 0");
    return std::exp(-d.a * M) * (1.0 + 1.0 / d.a) + std::exp(-d.b * M) * (1.0 + 1.0 / d.b);
}

Estimate simulate_piterbarg(const DriftSpec& d, double L, const SimConfig& cfg) {
    std::vector<Estimate> out = piterbarg_sweep(d, {L}, cfg);
    return out.front();
}

std::vector<Estimate> piterbarg_sweep(const DriftSpec& d, const std::vector<double>& Ls,
                                      const SimConfig& cfg) {
    d.validate();
    check_cfg(cfg);
    if (Ls.empty()) throw std::invalid_argument("piterbarg_sweep: no window lengths");
    double M = cfg.M;
    if (M <= 0)
        for (double L : Ls) M = std::max(M, default_truncation_piterbarg(d, L));

    auto layout = detail::build_supinf_layout(M, cfg.tau, 0.0, Ls, drift_fn(d));
    std::vector<detail::SupInfJob> jobs(Ls.size());
    for (std::size_t i = 0; i < Ls.size(); ++i) jobs[i] = {i, M, false};
    auto sampler = PathSampler::bm(layout.times);
    auto res = detail::run_supinf(sampler, layout, jobs, cfg.n, cfg.seed, cfg.threads);

    std::vector<Estimate> out;
    out.reserve(Ls.size());
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        Estimate e = summarize(res.supinf[i], cfg, M);
        if (std::min(d.a, d.b) < 1.0)
            e.warnings.push_back("shallow drift (min slope < 1) inflates the truncation range M");
        out.push_back(std::move(e));
    }
    return out;
}

MStabilityReport piterbarg_m_stability(const DriftSpec& d, double L,
                                       const std::vector<double>& Ms, const SimConfig& cfg) {
    d.validate();
    check_cfg(cfg);
    if (Ms.size() < 2) throw std::invalid_argument("m_stability: need at least two M values");
    std::vector<double> sorted = Ms;
    std::sort(sorted.begin(), sorted.end());
    const double M_max = sorted.back();

    auto layout = detail::build_supinf_layout(M_max, cfg.tau, 0.0, {L}, drift_fn(d));
    std::vector<detail::SupInfJob> jobs(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) jobs[i] = {0, sorted[i], false};
    auto sampler = PathSampler::bm(layout.times);
    auto res = detail::run_supinf(sampler, layout, jobs, cfg.n, cfg.seed, cfg.threads);

    MStabilityReport rep;
    rep.Ms = sorted;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        rep.estimates.push_back(summarize(res.supinf[i], cfg, sorted[i]));
    auto diff_stats = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> diff(cfg.n);
        for (std::size_t r = 0; r < cfg.n; ++r)
            diff[r] = res.supinf[hi][r] - res.supinf[lo][r];
        Estimate s = summarize(diff, cfg, sorted[hi]);
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
        const double d0 = rep.successive_diffs.front(), d1 = rep.successive_diffs.back();
        const double m0 = sorted[0], m1 = sorted[sorted.size() - 2];
        if (d0 > 0 && d1 > 0 && m1 > m0)
            rep.fitted_decay = std::log(d0 / d1) / (m1 - m0);
    }
    return rep;
}

}  // namespace parisian
