#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "parisian/model.hpp"

namespace parisian {

// How the excursion window scales with the capital level u.  The simulated
// (rescaled) window length is T_u / u with
//   ConstantWindow: T_u = T          (fixed-length excursions)
//   ScaledWindow:   T_u = T u^(2-1/H) (keeps T_u u^(1/H-2) = T exactly)
// The two agree at H = 1/2.
enum class WindowSchedule { ConstantWindow, ScaledWindow };

struct RuinMCConfig {
    double horizon = 0;  // rescaled time span; 0 = automatic
    double step = 0;     // grid step; 0 = automatic; must divide the window
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // results are independent of the thread count
    WindowSchedule schedule = WindowSchedule::ConstantWindow;
    double asymptotic_hint = std::nan("");  // optional: enables the rare-event warning
};

struct RuinEstimate {
    double p_hat = 0;
    double ci_low = 0, ci_high = 1;       // exact binomial 95% interval
    double ci95_half_width = 0;           // max distance from p_hat to an end
    std::size_t hits = 0, n = 0;
    double window = 0, horizon = 0, step = 0;  // rescaled-time settings actually used
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// True iff some length-`window` stretch of the grid lies strictly above the
// barrier: exists i with min(values[i..i+k]) > barrier over the window, where
// k = window/step must be integral (within 1e-9 relative).
bool sup_inf_crossing(const std::vector<double>& values, const std::vector<double>& barrier,
                      double step, double window);

// P(some window of length T_u lies above the line q u + c t), simulated in
// rescaled time: path B_H against the barrier u^(1-H) (q + c t).
RuinEstimate simulate_one_dim_parisian(double hurst, double c, double q, double u, double T,
                                       const RuinMCConfig& cfg);

// Two-company version: the barrier is the upper envelope of both lines, so a
// single window above it ruins both companies simultaneously.
RuinEstimate simulate_two_dim_parisian(const ModelParams& p, double u, const RuinMCConfig& cfg);

}  // namespace parisian
