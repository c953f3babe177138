#pragma once

#include <vector>

#include "parisian/sim.hpp"

namespace parisian {

// Truncation half-width for the ratio estimator: max(10 L, 5).
double default_truncation_pickands(double L);

// Exact window-L constant for H = 1/2 (Brownian case), monotone from 1 at
// L = 0 towards 0.
double exact_F1(double L);

// Ratio estimator of the window-L constant of fractional Brownian motion with
// Hurst index H: per replication,
//   [sup_t inf_{s in [t,t+L]} exp(W(s))] / [eta * sum over the eta-grid exp(W)]
// with W(s) = sqrt(2) B_H(s) - |s|^(2H), t over [-M, M] on a tau-grid.
Estimate simulate_pickands(double hurst, double L, const SimConfig& cfg);

// Common random numbers across window lengths (shared paths, shared M), so the
// per-replication ratios are evaluated on identical paths for every L.
// cfg.M = 0 uses the largest per-L default.
std::vector<Estimate> pickands_sweep(double hurst, const std::vector<double>& window_lengths,
                                     const SimConfig& cfg);

// Nested truncation diagnostics on one path set; both the sup range and the
// averaging range are cut at each M.
MStabilityReport pickands_m_stability(double hurst, double L, const std::vector<double>& Ms,
                                      const SimConfig& cfg);

// E[ 1 / integral_{-M}^{M} exp(W(s)) ds ] by trapezoid rule on an eta-grid;
// an independent ingredient of the provable lower bound.  cfg.M = 0 -> M = 10.
Estimate estimate_inverse_integral_expectation(double hurst, const SimConfig& cfg);

// P(sup_{[0,1]} B_H < m) for each threshold, by Monte Carlo on a tau-grid.
std::vector<double> estimate_sup_cdf(double hurst, const std::vector<double>& thresholds,
                                     const SimConfig& cfg);

// Provable lower bound assembled from simulated ingredients:
//   inv_integral * exp(-L^(2H)) * max_m exp(-sqrt(2) m L^H) P(sup_{[0,1]} B_H < m).
// `simplified` fixes m = 1/sqrt(2), giving C * exp(-L^(2H) - L^H).
struct PickandsLowerBound {
    double bound = 0;
    double simplified = 0;
    double best_m = 0;
};

PickandsLowerBound pickands_lower_bound(double hurst, double L, double inv_integral,
                                        const std::vector<double>& m_grid,
                                        const std::vector<double>& sup_cdf);

}  // namespace parisian
