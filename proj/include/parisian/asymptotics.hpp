#pragma once

#include <memory>
#include <string>
#include <vector>

#include "parisian/model.hpp"
#include "parisian/registry.hpp"
#include "parisian/sim.hpp"

namespace parisian {

// Ultimate-ruin probability of drifted Brownian motion: P = exp(-2 c u).
double classical_bm_ruin(double c, double u);

// Probability that drifted Brownian motion stays above level u for a stretch
// of length T at least once; exact for every u > 0, reduces to the classical
// formula at T = 0.
double parisian_bm_ruin(double c, double u, double T);

// Supplies the one simulated constant an asymptotic formula may need.
struct ResolvedConstant {
    double value = 0;
    double std_error = 0;
    std::string source;  // "exact", "simulated", "cached", "fixed"
};

class ConstantProvider {
  public:
    virtual ~ConstantProvider() = default;
    virtual ResolvedConstant resolve(const ConstantDescriptor& d) = 0;
};

// Simulates on demand with the per-family default truncation rules; uses exact
// closed forms where available (window 0, or the Brownian ratio family), and
// an optional registry for caching.
class SimulatingProvider : public ConstantProvider {
  public:
    SimulatingProvider(SimConfig cfg, Registry* registry = nullptr,
                       ResolvePolicy policy = ResolvePolicy::UseOrSimulate);
    ResolvedConstant resolve(const ConstantDescriptor& d) override;

  private:
    SimConfig cfg_;
    Registry* registry_;
    ResolvePolicy policy_;
};

// Fixed lookup table for tests and offline use; throws MissingConstant when a
// requested descriptor is absent (which also makes it a "must not be
// consulted" probe when empty).
class FixedProvider : public ConstantProvider {
  public:
    void add(const ConstantDescriptor& d, double value, double std_error = 0);
    ResolvedConstant resolve(const ConstantDescriptor& d) override;

  private:
    std::vector<std::pair<ConstantDescriptor, ResolvedConstant>> table_;
};

struct AsymptoticResult {
    double value = 0;
    Regime regime{RegimeTag::Interior, 0};
    std::string branch;           // which formula branch produced the value
    double constant = 0;          // simulated constant entering the formula, 1 if none
    double constant_se = 0;
    std::string constant_source;  // empty when no constant was needed
    std::vector<std::string> notes;
};

// Large-u approximation for one company (boundary q*u + c*t).  H = 1/2 uses
// the exact Brownian formula; otherwise a simulated constant is required and
// provider == nullptr raises MissingConstant.
AsymptoticResult one_dim_parisian_asymptotic(double hurst, double c, double q, double u,
                                             double T, ConstantProvider* provider);

// Large-u approximation for the two-company problem, branching on the regime
// of t_star relative to (t1, t2); boundary regimes carry a factor 1/2.
AsymptoticResult two_dim_parisian_asymptotic(const ModelParams& p, double u,
                                             ConstantProvider* provider);

// Sandwich bounds for the interior regime with H < 1/2 and fixed window T > 0
// (where the scaled-window approximation above does not apply).
struct SmallHurstBounds {
    double lower = 0, upper = 0;
    double alpha = 0;   // window-to-crossing-time ratio entering the exponents
    double C1 = 0, C2 = 0;
    double C_bar = 1;   // envelope constant in (0, 1]; 1 unless fitted
};

SmallHurstBounds small_hurst_bounds(const ModelParams& p, double u, double C_bar = 1.0);

// Extracts the limiting scaled window T from samples (u_i, T_u(u_i)) with
// u strictly increasing: returns the stabilized value of T_u * u^(1/H - 2),
// 0 for clean decay to zero, and throws NotConvergent otherwise.
double check_window_limit(const std::vector<std::pair<double, double>>& u_and_window,
                          double hurst);

}  // namespace parisian
