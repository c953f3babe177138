#include "parisian/detail/supinf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parisian/detail/sliding_min.hpp"
#include "parisian/rng.hpp"

namespace parisian::detail {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

long long steps_in(double x, double step) {
    return static_cast<long long>(std::floor(x / step + 1e-9));
}

}  // namespace

SupInfLayout build_supinf_layout(double M_grid, double tau, double eta,
                                 const std::vector<double>& window_lengths,
                                 const std::function<double(double)>& drift) {
    if (!(M_grid >= tau)) throw std::invalid_argument("supinf layout: M must be >= tau");
    if (!(tau > 0)) throw std::invalid_argument("supinf layout: tau must be positive");
    if (window_lengths.empty()) throw std::invalid_argument("supinf layout: no window lengths");

    SupInfLayout lay;
    lay.tau = tau;
    lay.eta = eta;
    lay.window_lengths = window_lengths;
    lay.k_sup = steps_in(M_grid, tau);
    const double L_max = *std::max_element(window_lengths.begin(), window_lengths.end());
    lay.k_hi = steps_in(M_grid + L_max, tau);

    // Tag every requested time, merge, then map each tag to its merged index.
    struct Tagged {
        double t;
        int list;            // 0 base, 1 denom, 2.. endpoint list per window length
        std::size_t pos;
    };
    std::vector<Tagged> all;
    for (long long k = -lay.k_sup; k <= lay.k_hi; ++k)
        all.push_back({static_cast<double>(k) * tau, 0,
                       static_cast<std::size_t>(k + lay.k_sup)});
    if (eta > 0) {
        lay.j_sup = steps_in(M_grid, eta);
        for (long long j = -lay.j_sup; j <= lay.j_sup; ++j)
            all.push_back({static_cast<double>(j) * eta, 1,
                           static_cast<std::size_t>(j + lay.j_sup)});
    }
    lay.widths.resize(window_lengths.size());
    lay.endpoint_idx.resize(window_lengths.size());
    const std::size_t n_sup = static_cast<std::size_t>(2 * lay.k_sup + 1);
    for (std::size_t li = 0; li < window_lengths.size(); ++li) {
        const double L = window_lengths[li];
        if (!(L >= 0)) throw std::invalid_argument("supinf layout: window length must be >= 0");
        const long long w = steps_in(L, tau);
        lay.widths[li] = static_cast<std::size_t>(w);
        const bool off_grid = (L - static_cast<double>(w) * tau) > tau * 1e-7;
        if (!off_grid) continue;
        lay.endpoint_idx[li].assign(n_sup, -1);
        for (long long k = -lay.k_sup; k <= lay.k_sup; ++k)
            all.push_back({static_cast<double>(k) * tau + L,
                           static_cast<int>(2 + li),
                           static_cast<std::size_t>(k + lay.k_sup)});
    }

    std::sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) { return x.t < y.t; });
    const double merge_tol = (eta > 0 ? std::min(tau, eta) : tau) * 1e-6;
    lay.base.resize(static_cast<std::size_t>(lay.k_hi + lay.k_sup + 1));
    lay.denom.resize(eta > 0 ? static_cast<std::size_t>(2 * lay.j_sup + 1) : 0);
    for (const Tagged& item : all) {
        if (lay.times.empty() || item.t - lay.times.back() > merge_tol)
            lay.times.push_back(item.t);
        const std::size_t idx = lay.times.size() - 1;
        if (item.list == 0)
            lay.base[item.pos] = idx;
        else if (item.list == 1)
            lay.denom[item.pos] = idx;
        else
            lay.endpoint_idx[static_cast<std::size_t>(item.list - 2)][item.pos] =
                static_cast<std::ptrdiff_t>(idx);
    }
    lay.drift.resize(lay.times.size());
    for (std::size_t i = 0; i < lay.times.size(); ++i) lay.drift[i] = drift(lay.times[i]);
    return lay;
}

SupInfResults run_supinf(const PathSampler& sampler, const SupInfLayout& layout,
                         const std::vector<SupInfJob>& jobs, std::size_t n,
                         std::uint64_t seed, unsigned threads) {
    if (sampler.times().size() != layout.times.size())
        throw std::invalid_argument("run_supinf: sampler/layout mismatch");
    const std::size_t n_times = layout.times.size();
    const std::size_t n_base = layout.base.size();
    const bool any_denom =
        std::any_of(jobs.begin(), jobs.end(), [](const SupInfJob& j) { return j.want_denom; });

    SupInfResults res;
    res.supinf.assign(jobs.size(), std::vector<double>(n));
    res.denom.assign(jobs.size(), std::vector<double>());
    for (std::size_t j = 0; j < jobs.size(); ++j)
        if (jobs[j].want_denom) res.denom[j].assign(n, 0.0);

    // Distinct window widths so the sliding pass runs once per width per path.
    std::vector<std::size_t> width_of_job(jobs.size());
    std::vector<std::size_t> distinct_w;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const std::size_t w = layout.widths.at(jobs[j].w_idx);
        auto it = std::find(distinct_w.begin(), distinct_w.end(), w);
        if (it == distinct_w.end()) {
            width_of_job[j] = distinct_w.size();
            distinct_w.push_back(w);
        } else {
            width_of_job[j] = static_cast<std::size_t>(it - distinct_w.begin());
        }
    }

    const unsigned n_threads = threads ? threads : default_threads();
    constexpr std::size_t kBlock = 64;

    parallel_blocks(n, n_threads, [&](std::size_t rep_b, std::size_t rep_e) {
        Eigen::MatrixXd block(static_cast<Eigen::Index>(n_times),
                              static_cast<Eigen::Index>(std::min(kBlock, rep_e - rep_b)));
        Eigen::VectorXd g(static_cast<Eigen::Index>(n_times));
        std::vector<double> gbase(n_base);
        std::vector<std::vector<double>> slide(distinct_w.size());
        for (std::size_t wi = 0; wi < distinct_w.size(); ++wi)
            slide[wi].resize(n_base - distinct_w[wi]);
        std::vector<double> cumexp(any_denom ? layout.denom.size() + 1 : 0, 0.0);
        SlidingMin slider;
        const Eigen::Map<const Eigen::VectorXd> drift(layout.drift.data(),
                                                      static_cast<Eigen::Index>(n_times));

        for (std::size_t b = rep_b; b < rep_e; b += kBlock) {
            const std::size_t len = std::min(kBlock, rep_e - b);
            auto cols = block.leftCols(static_cast<Eigen::Index>(len));
            sampler.sample_into(cols, seed, b);
            for (std::size_t c = 0; c < len; ++c) {
                const std::size_t rep = b + c;
                g = kSqrt2 * cols.col(static_cast<Eigen::Index>(c)) + drift;
                for (std::size_t i = 0; i < n_base; ++i)
                    gbase[i] = g(static_cast<Eigen::Index>(layout.base[i]));
                for (std::size_t wi = 0; wi < distinct_w.size(); ++wi)
                    slider.run(gbase.data(), n_base, distinct_w[wi], slide[wi].data());
                if (any_denom) {
                    for (std::size_t i = 0; i < layout.denom.size(); ++i)
                        cumexp[i + 1] =
                            cumexp[i] + std::exp(g(static_cast<Eigen::Index>(layout.denom[i])));
                }
                for (std::size_t j = 0; j < jobs.size(); ++j) {
                    const SupInfJob& job = jobs[j];
                    const long long k_e = std::min(
                        static_cast<long long>(std::floor(job.M_eval / layout.tau + 1e-9)),
                        layout.k_sup);
                    const std::vector<double>& mins = slide[width_of_job[j]];
                    const auto& endpoints = layout.endpoint_idx[job.w_idx];
                    double best = -std::numeric_limits<double>::infinity();
                    const std::size_t i_lo = static_cast<std::size_t>(layout.k_sup - k_e);
                    const std::size_t i_hi = static_cast<std::size_t>(layout.k_sup + k_e);
                    for (std::size_t i = i_lo; i <= i_hi; ++i) {
                        double m = mins[i];
                        if (!endpoints.empty() && endpoints[i] >= 0) {
                            const double ge = g(static_cast<Eigen::Index>(endpoints[i]));
                            if (ge < m) m = ge;
                        }
                        if (m > best) best = m;
                    }
                    res.supinf[j][rep] = std::exp(best);
                    if (job.want_denom) {
                        const long long j_e = std::min(
                            static_cast<long long>(std::floor(job.M_eval / layout.eta + 1e-9)),
                            layout.j_sup);
                        const std::size_t d_lo = static_cast<std::size_t>(layout.j_sup - j_e);
                        const std::size_t d_hi = static_cast<std::size_t>(layout.j_sup + j_e + 1);
                        res.denom[j][rep] = layout.eta * (cumexp[d_hi] - cumexp[d_lo]);
                    }
                }
            }
        }
    });
    return res;
}

}  // namespace parisian::detail
