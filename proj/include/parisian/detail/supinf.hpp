#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "parisian/fbm.hpp"

namespace parisian::detail {

// Merged simulation grid for sup-inf path functionals.  It contains the
// tau-grid spanning [-M_grid, M_grid + max(Ls)], the eta-grid spanning
// [-M_grid, M_grid] when eta > 0, and the exact window endpoints t + L for
// every L that is not a multiple of tau.  Sup positions are the tau-grid
// points with |t| <= M; inner windows are {t, t+tau, ..., t+floor(L/tau)*tau}
// plus the exact endpoint t + L.
struct SupInfLayout {
    std::vector<double> times;      // sorted, deduplicated, may contain 0
    double tau = 0, eta = 0;
    long long k_sup = 0;            // tau-grid sup positions: k in [-k_sup, k_sup]
    long long k_hi = 0;             // tau-grid extends to k = k_hi on the right
    std::vector<std::size_t> base;  // merged index of tau-grid point k, entry k + k_sup
    long long j_sup = 0;            // eta-grid: j in [-j_sup, j_sup]
    std::vector<std::size_t> denom; // merged index of eta-grid point j, entry j + j_sup
    std::vector<double> window_lengths;
    std::vector<std::size_t> widths;                        // floor(L/tau) per window length
    std::vector<std::vector<std::ptrdiff_t>> endpoint_idx;  // per L: merged idx of t+L per sup
                                                            // position, or -1 when on-grid
    std::vector<double> drift;      // deterministic drift at each merged time
};

SupInfLayout build_supinf_layout(double M_grid, double tau, double eta,
                                 const std::vector<double>& window_lengths,
                                 const std::function<double(double)>& drift);

// One statistic to extract per replication: which window length, how far the
// sup range reaches, and whether the eta-sum denominator is needed.
struct SupInfJob {
    std::size_t w_idx = 0;
    double M_eval = 0;
    bool want_denom = false;
};

struct SupInfResults {
    // supinf[job][rep] = sup over t of (window inf of exp(sqrt(2) path + drift))
    std::vector<std::vector<double>> supinf;
    // denom[job][rep] = eta * sum over eta-grid of exp(...), if requested
    std::vector<std::vector<double>> denom;
};

SupInfResults run_supinf(const PathSampler& sampler, const SupInfLayout& layout,
                         const std::vector<SupInfJob>& jobs, std::size_t n,
                         std::uint64_t seed, unsigned threads);

}  // namespace parisian::detail
