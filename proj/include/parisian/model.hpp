#pragma once

#include <array>

namespace parisian {

// Raw quota-share contract: initial capitals x_i, premium rates rho_i and
// retained shares delta_i of the two companies sharing one claim stream.
struct QuotaShareInputs {
    double x1 = 0, x2 = 0;
    double rho1 = 0, rho2 = 0;
    double delta1 = 0, delta2 = 0;
    void validate() const;  // throws std::invalid_argument
};

// Normalized two-boundary problem: ruin of company i happens when the driving
// path exceeds the line q_i*u + c_i*t.  Companies are ordered so c1 > c2 and
// q2 > q1 (lines cross at a positive time); `relabeled` records a swap.
struct ModelParams {
    double c1 = 0, c2 = 0;
    double q1 = 0, q2 = 0;
    double hurst = 0.5;  // H in (0,1)
    double T = 0;        // excursion length parameter, >= 0
    bool relabeled = false;
    void validate() const;  // throws std::invalid_argument / NonIntersectingBarriers
};

// u_ref sets the common capital scale: q_i = (x_i/delta_i) / u_ref.
ModelParams normalize_quota_share(const QuotaShareInputs& in, double hurst, double T,
                                  double u_ref = 1.0);

struct CriticalTimes {
    double t_star;  // where the two boundary lines cross
    double t1, t2;  // per-company variance-maximizing times, t1 < t2
};

CriticalTimes critical_times(const ModelParams& p);

enum class RegimeTag { LeftOfT1, BoundaryT1, Interior, BoundaryT2, RightOfT2 };

struct Regime {
    RegimeTag tag;
    int dominant;  // 1 or 2 when a single company drives the tail, 0 for Interior
};

// Places t_star relative to (t1, t2); equality is detected with relative
// tolerance 1e-12 so exact-boundary fixtures classify as boundaries.
Regime classify_regime(const ModelParams& p);

// Coefficients of the closed-form tail approximations.  Indices 0/1 refer to
// companies 1/2.
struct StructuralConstants {
    double tail_prefactor;                   // universal prefactor, sqrt(2*pi) at H = 1/2
    std::array<double, 2> tail_arg_coef;     // multiplies u^(1-H) in the one-company tail
    std::array<double, 2> window_scale;      // multiplies T in the one-company constant
    double peak_coef;                        // multiplies u^(1-H) in the interior tail
    double interior_window;                  // effective window of the drifted constant, H = 1/2
    double drift_pos_slope;                  // interior drift slope on s >= 0 (the "a" side)
    double drift_neg_slope;                  // interior drift slope on s < 0 (the "b" side)
    double interior_window_scale;            // multiplies T in the interior constant, H < 1/2
    double interior_amplitude;               // amplitude of the interior correction, H < 1/2
};

StructuralConstants structural_constants(const ModelParams& p);

}  // namespace parisian
