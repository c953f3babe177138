#pragma once

#include <utility>
#include <vector>

#include "parisian/sim.hpp"

namespace parisian {

// Piecewise-linear drift h(s) = b*s for s < 0 and -a*s for s >= 0, both slopes
// positive so the drifted field decays in both directions.
struct DriftSpec {
    double a = 1, b = 1;
    void validate() const;
};

// Truncation half-width making the tail outside [-M, M] negligible at the
// default accuracy; grows like 1/min(a,b) for shallow drifts.
double default_truncation_piterbarg(const DriftSpec& d, double L);

// Exact value of the window-0 constant: 1 + 1/a + 1/b - 1/(a+b+1).
double piterbarg_closed_form(const DriftSpec& d);

// Proven envelope for the window-L constant: the lower bound decays with L,
// the upper bound is the window-0 closed form.
std::pair<double, double> piterbarg_bounds(const DriftSpec& d, double L);

// Bound on the error of truncating the sup range to [-M, M]:
// exp(-a M)(1 + 1/a) + exp(-b M)(1 + 1/b).
double piterbarg_truncation_bound(const DriftSpec& d, double M);

// Monte Carlo estimate of E sup_t inf_{s in [t, t+L]} exp(sqrt(2) B(s) - |s| + h(s))
// over t in [-M, M] on a tau-grid; exact-in-distribution Brownian sampling.
Estimate simulate_piterbarg(const DriftSpec& d, double L, const SimConfig& cfg);

// One path set evaluated at every window length (common random numbers), so
// estimates are non-increasing in L replication by replication.  cfg.M = 0
// uses the largest per-L default so all lengths share a grid.
std::vector<Estimate> piterbarg_sweep(const DriftSpec& d, const std::vector<double>& window_lengths,
                                      const SimConfig& cfg);

// Truncation diagnostics: common paths on the [-M_max, M_max + L] grid,
// evaluated with the sup range cut at each M.  Differences are per-replication,
// so their standard errors are exact, not independence approximations.  For
// this estimator est(M) is non-decreasing in M path by path.
MStabilityReport piterbarg_m_stability(const DriftSpec& d, double L,
                                       const std::vector<double>& Ms, const SimConfig& cfg);

}  // namespace parisian
