#include "parisian/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "parisian/errors.hpp"
#include "parisian/normal.hpp"
#include "parisian/pickands.hpp"
#include "parisian/piterbarg.hpp"

namespace parisian {

namespace {

bool close(double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({std::abs(x), std::abs(y), 1.0});
}

}  // namespace

double classical_bm_ruin(double c, double u) {
    if (!(c > 0) || !(u >= 0))
        throw std::invalid_argument("classical_bm_ruin: need c > 0 and u >= 0");
    return std::exp(-2.0 * c * u);
}

double parisian_bm_ruin(double c, double u, double T) {
    if (!(c > 0) || !(u >= 0) || !(T >= 0))
        throw std::invalid_argument("parisian_bm_ruin: need c > 0, u >= 0, T >= 0");
    double prefactor = 1.0;  // T = 0 reduces exactly to the classical formula
    if (T > 0) {
        const double e = std::exp(-c * c * T / 2.0);
        const double root = c * std::sqrt(2.0 * M_PI * T);
        const double arg = c * std::sqrt(T);
        prefactor = (e - root * normal_cdf(-arg)) / (e + root * normal_cdf(arg));
    }
    return prefactor * std::exp(-2.0 * c * u);
}

// ---------------- providers ----------------

SimulatingProvider::SimulatingProvider(SimConfig cfg, Registry* registry, ResolvePolicy policy)
    : cfg_(cfg), registry_(registry), policy_(policy) {}

ResolvedConstant SimulatingProvider::resolve(const ConstantDescriptor& d) {
    d.validate();
    if (d.kind == ConstantDescriptor::Kind::Piterbarg && d.window == 0)
        return {piterbarg_closed_form({d.a, d.b}), 0.0, "exact"};
    if (d.kind == ConstantDescriptor::Kind::Pickands && d.hurst == 0.5)
        return {exact_F1(d.window), 0.0, "exact"};

    RecordConfig rc;
    rc.tau = cfg_.tau;
    rc.n = cfg_.n;
    rc.seed = cfg_.seed;
    if (d.kind == ConstantDescriptor::Kind::Piterbarg) {
        rc.M = cfg_.M > 0 ? cfg_.M : default_truncation_piterbarg({d.a, d.b}, d.window);
        rc.eta = std::nan("");
    } else {
        rc.M = cfg_.M > 0 ? cfg_.M : default_truncation_pickands(d.window);
        rc.eta = cfg_.eta > 0 ? cfg_.eta : cfg_.tau;
    }

    auto simulate = [&]() {
        SimConfig sc = cfg_;
        sc.M = rc.M;
        ConstantRecord rec;
        Estimate e = d.kind == ConstantDescriptor::Kind::Piterbarg
                         ? simulate_piterbarg({d.a, d.b}, d.window, sc)
                         : simulate_pickands(d.hurst, d.window, sc);
        rec.value = e.value;
        rec.std_error = e.std_error;
        return rec;
    };

    if (registry_) {
        if (auto hit = registry_->get(d, rc)) return {hit->value, hit->std_error, "cached"};
        if (policy_ == ResolvePolicy::CacheOnly)
            throw MissingConstant("constant not cached and policy forbids simulation");
        ConstantRecord rec = registry_->resolve(d, rc, ResolvePolicy::UseOrSimulate, simulate);
        return {rec.value, rec.std_error, "simulated"};
    }
    if (policy_ == ResolvePolicy::CacheOnly)
        throw MissingConstant("no registry attached and policy forbids simulation");
    ConstantRecord rec = simulate();
    return {rec.value, rec.std_error, "simulated"};
}

void FixedProvider::add(const ConstantDescriptor& d, double value, double std_error) {
    table_.emplace_back(d, ResolvedConstant{value, std_error, "fixed"});
}

ResolvedConstant FixedProvider::resolve(const ConstantDescriptor& d) {
    for (const auto& [key, val] : table_) {
        if (key.kind != d.kind || !close(key.window, d.window)) continue;
        if (d.kind == ConstantDescriptor::Kind::Pickands) {
            if (close(key.hurst, d.hurst)) return val;
        } else if (close(key.a, d.a) && close(key.b, d.b)) {
            return val;
        }
    }
    throw MissingConstant("FixedProvider: no entry for the requested constant");
}

// ---------------- asymptotic formulas ----------------

namespace {

ResolvedConstant need(ConstantProvider* provider, const ConstantDescriptor& d) {
    if (!provider)
        throw MissingConstant("asymptotic formula needs a simulated constant; no provider given");
    return provider->resolve(d);
}

AsymptoticResult& finish(AsymptoticResult& res) {
    if (res.value > 1.0)
        res.notes.push_back("value exceeds 1: leading-order equivalent, not a probability at this u");
    return res;
}

}  // namespace

AsymptoticResult one_dim_parisian_asymptotic(double hurst, double c, double q, double u,
                                             double T, ConstantProvider* provider) {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("one_dim_parisian_asymptotic: hurst must lie in (0,1)");
    if (!(c > 0) || !(q > 0) || !(u > 0) || !(T >= 0))
        throw std::invalid_argument("one_dim_parisian_asymptotic: need c, q, u > 0 and T >= 0");

    AsymptoticResult res;
    res.regime = {RegimeTag::Interior, 0};  // not meaningful for one company
    if (hurst == 0.5) {
        res.branch = "one-dim brownian exact";
        res.value = parisian_bm_ruin(c, q * u, T);
        res.constant = 1.0;
        res.constant_source = "exact";
        res.notes.push_back("Brownian case: exact for every u, not only asymptotically");
        return finish(res);
    }
    const double H = hurst;
    const double coef = std::pow(c, H) * std::pow(q, 1.0 - H) /
                        (std::pow(H, H) * std::pow(1.0 - H, 1.0 - H));
    const double window_scale = c * c * std::pow(1.0 - H, 2.0 - 1.0 / H) /
                                (std::pow(2.0, 1.0 / (2.0 * H)) * H * H);
    ConstantDescriptor d;
    d.kind = ConstantDescriptor::Kind::Pickands;
    d.hurst = H;
    d.window = T * window_scale;
    const ResolvedConstant F = need(provider, d);
    const double K =
        std::pow(2.0, 0.5 - 1.0 / (2.0 * H)) * std::sqrt(M_PI) / std::sqrt(H * (1.0 - H));
    const double arg = coef * std::pow(u, 1.0 - H);
    res.branch = "one-dim fbm tail";
    res.value = K * F.value * std::pow(arg, 1.0 / H - 1.0) * normal_tail(arg);
    res.constant = F.value;
    res.constant_se = F.std_error;
    res.constant_source = F.source;
    return finish(res);
}

AsymptoticResult two_dim_parisian_asymptotic(const ModelParams& p, double u,
                                             ConstantProvider* provider) {
    p.validate();
    if (!(u > 0)) throw std::invalid_argument("two_dim_parisian_asymptotic: u must be positive");
    const Regime regime = classify_regime(p);
    const StructuralConstants s = structural_constants(p);
    const double H = p.hurst;

    AsymptoticResult res;
    res.regime = regime;
    res.constant = 1.0;

    if (regime.tag != RegimeTag::Interior) {
        // One company dominates; boundary cases get half its contribution.
        const double half =
            (regime.tag == RegimeTag::BoundaryT1 || regime.tag == RegimeTag::BoundaryT2) ? 0.5
                                                                                         : 1.0;
        const int id = regime.dominant - 1;
        const double c = id == 0 ? p.c1 : p.c2;
        const double q = id == 0 ? p.q1 : p.q2;
        if (half == 0.5)
            res.notes.push_back("crossing time sits exactly on a critical time: factor 1/2");
        const std::string who = "dominant-" + std::to_string(regime.dominant);
        if (H == 0.5) {
            res.branch = who + " brownian exact";
            res.value = half * parisian_bm_ruin(c, q * u, p.T);
            res.constant_source = "exact";
            return finish(res);
        }
        ConstantDescriptor d;
        d.kind = ConstantDescriptor::Kind::Pickands;
        d.hurst = H;
        d.window = p.T * s.window_scale[static_cast<std::size_t>(id)];
        const ResolvedConstant F = need(provider, d);
        const double arg = s.tail_arg_coef[static_cast<std::size_t>(id)] * std::pow(u, 1.0 - H);
        res.branch = who + " fbm tail";
        res.value = half * s.tail_prefactor * F.value * std::pow(arg, 1.0 / H - 1.0) *
                    normal_tail(arg);
        res.constant = F.value;
        res.constant_se = F.std_error;
        res.constant_source = F.source;
        return finish(res);
    }

    // Interior: both lines matter near the crossing time.
    const double psi = normal_tail(s.peak_coef * std::pow(u, 1.0 - H));
    if (H > 0.5) {
        res.branch = "interior smooth tail";
        res.value = psi;
        if (p.T > 0)
            res.notes.push_back(
                "valid when the window shrinks so that T_u * u^(2 - 1/H) -> 0; "
                "a fixed positive window is outside this approximation");
        return finish(res);
    }
    if (H == 0.5) {
        const DriftSpec drift{s.drift_pos_slope, s.drift_neg_slope};
        if (s.interior_window == 0) {
            res.branch = "interior drifted-sup closed form";
            res.value = piterbarg_closed_form(drift) * psi;
            res.constant = piterbarg_closed_form(drift);
            res.constant_source = "exact";
            return finish(res);
        }
        ConstantDescriptor d;
        d.kind = ConstantDescriptor::Kind::Piterbarg;
        d.hurst = 0.5;
        d.window = s.interior_window;
        d.a = drift.a;
        d.b = drift.b;
        const ResolvedConstant F = need(provider, d);
        res.branch = "interior drifted-sup window";
        res.value = F.value * psi;
        res.constant = F.value;
        res.constant_se = F.std_error;
        res.constant_source = F.source;
        return finish(res);
    }
    // H < 1/2: simulated constant with a window scaled by the crossing-time
    // geometry, times a polynomially growing amplitude.
    ConstantDescriptor d;
    d.kind = ConstantDescriptor::Kind::Pickands;
    d.hurst = H;
    d.window = s.interior_window_scale * p.T;
    const ResolvedConstant F = need(provider, d);
    const double growth = std::pow(u, (1.0 - H) * (1.0 / H - 2.0));
    res.branch = "interior rough tail";
    res.value = F.value * s.interior_amplitude * growth * psi;
    res.constant = F.value;
    res.constant_se = F.std_error;
    res.constant_source = F.source;
    return finish(res);
}

SmallHurstBounds small_hurst_bounds(const ModelParams& p, double u, double C_bar) {
    p.validate();
    if (!(u > 0)) throw std::invalid_argument("small_hurst_bounds: u must be positive");
    if (!(C_bar > 0) || !(C_bar <= 1))
        throw std::invalid_argument("small_hurst_bounds: C_bar must lie in (0,1]");
    if (!(p.hurst < 0.5))
        throw WrongRegime("small_hurst_bounds: only for hurst < 1/2");
    if (!(p.T > 0)) throw WrongRegime("small_hurst_bounds: only for a fixed window T > 0");
    if (classify_regime(p).tag != RegimeTag::Interior)
        throw WrongRegime("small_hurst_bounds: only for the interior regime");

    const StructuralConstants s = structural_constants(p);
    const CriticalTimes t = critical_times(p);
    const double H = p.hurst;
    const double two_h = 2.0 * H;

    SmallHurstBounds out;
    out.C_bar = C_bar;
    out.alpha = std::pow(p.T, two_h) / (2.0 * std::pow(t.t_star, two_h));
    out.C1 = out.alpha * s.peak_coef * s.peak_coef;
    out.C2 = 0.5 * out.alpha * out.alpha * s.peak_coef * s.peak_coef;
    const double psi = normal_tail(s.peak_coef * std::pow(u, 1.0 - H));
    out.lower = C_bar * psi *
                std::exp(-out.C1 * std::pow(u, 2.0 - 4.0 * H) -
                         out.C2 * std::pow(u, 2.0 * (1.0 - 3.0 * H)));
    out.upper = 2.0 * psi *
                normal_tail(std::pow(u, 1.0 - 2.0 * H) * std::pow(p.T, H) * s.peak_coef /
                            (2.0 * std::pow(t.t_star, H)));
    return out;
}

double check_window_limit(const std::vector<std::pair<double, double>>& u_and_window,
                          double hurst) {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("check_window_limit: hurst must lie in (0,1)");
    if (u_and_window.size() < 3)
        throw std::invalid_argument("check_window_limit: need at least 3 samples");
    const double expo = 1.0 / hurst - 2.0;
    std::vector<double> v;
    double scale = 0;
    double prev_u = 0;
    for (auto [u, Tu] : u_and_window) {
        if (!(u > prev_u))
            throw std::invalid_argument("check_window_limit: u must be strictly increasing");
        if (!(Tu >= 0)) throw std::invalid_argument("check_window_limit: windows must be >= 0");
        prev_u = u;
        v.push_back(Tu * std::pow(u, expo));
        scale = std::max(scale, v.back());
    }
    if (scale == 0) return 0.0;

    const double last = v[v.size() - 1], prev = v[v.size() - 2];
    if (std::abs(last - prev) <= 0.05 * std::max(std::abs(last), std::abs(prev))) return last;

    bool decaying = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (!(v[i] > 0) || v[i + 1] / v[i] > 0.95) {
            decaying = false;
            break;
        }
    }
    if (decaying) return 0.0;
    throw NotConvergent("check_window_limit: scaled windows neither stabilize nor decay");
}

}  // namespace parisian
