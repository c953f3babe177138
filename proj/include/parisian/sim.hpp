#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace parisian {

// Shared Monte Carlo settings for the constant estimators.
struct SimConfig {
    double M = 0;          // truncation half-width; 0 = per-estimator default rule
    double tau = 0.005;    // grid step for the sup and the inner windows
    double eta = 0;        // averaging-grid step (ratio estimators); 0 = same as tau
    std::size_t n = 10000; // replications
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency; results do not depend on it
};

struct Estimate {
    double value = 0;
    double std_error = 0;
    std::size_t n = 0;
    double M = 0, tau = 0, eta = 0;  // settings actually used
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// Output of the truncation-stability diagnostics: one common path set,
// evaluated with the sup range (and averaging range, where applicable) cut at
// several half-widths M.
struct MStabilityReport {
    std::vector<double> Ms;                // ascending
    std::vector<Estimate> estimates;
    std::vector<double> successive_diffs;  // |est(M_i) - est(M_{i+1})|
    std::vector<double> diff_ses;          // per-replication se of each difference
    double headline_diff = 0;              // est(M_max) - est(M_min)
    double headline_se = 0;
    double fitted_decay = 0;               // decay rate fitted to successive diffs, 0 if n/a
};

}  // namespace parisian
