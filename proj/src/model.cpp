#include "parisian/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parisian/errors.hpp"

namespace parisian {

namespace {

bool rel_equal(double x, double y) {
    const double tol = 1e-12;
    return std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1e-300});
}

}  // namespace

void QuotaShareInputs::validate() const {
    for (double v : {x1, x2, rho1, rho2, delta1, delta2})
        if (!(v > 0) || !std::isfinite(v))
            throw std::invalid_argument("QuotaShareInputs: all entries must be positive and finite");
}

void ModelParams::validate() const {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("ModelParams: hurst must lie in (0,1)");
    if (!(T >= 0) || !std::isfinite(T))
        throw std::invalid_argument("ModelParams: T must be finite and >= 0");
    for (double v : {c1, c2, q1, q2})
        if (!(v > 0) || !std::isfinite(v))
            throw std::invalid_argument("ModelParams: c1,c2,q1,q2 must be positive and finite");
    if (!(c1 > c2) || !(q2 > q1))
        throw NonIntersectingBarriers(
            "ModelParams: boundary lines must satisfy c1 > c2 and q2 > q1");
}

ModelParams normalize_quota_share(const QuotaShareInputs& in, double hurst, double T,
                                  double u_ref) {
    in.validate();
    if (!(u_ref > 0) || !std::isfinite(u_ref))
        throw std::invalid_argument("normalize_quota_share: u_ref must be positive");

    // Dividing each company's surplus by its retained share delta_i turns the
    // shared claim stream into a common driving path with per-company lines.
    const double ca = in.rho1 / in.delta1, cb = in.rho2 / in.delta2;
    const double qa = (in.x1 / in.delta1) / u_ref, qb = (in.x2 / in.delta2) / u_ref;

    ModelParams p;
    p.hurst = hurst;
    p.T = T;
    if (ca > cb) {
        p.c1 = ca; p.q1 = qa; p.c2 = cb; p.q2 = qb;
        p.relabeled = false;
    } else {
        p.c1 = cb; p.q1 = qb; p.c2 = ca; p.q2 = qa;
        p.relabeled = true;
    }
    if (p.c1 == p.c2 || p.q1 == p.q2)
        throw NonIntersectingBarriers("normalize_quota_share: boundary lines coincide in slope or level");
    if (!(p.q2 > p.q1))
        throw NonIntersectingBarriers(
            "normalize_quota_share: steeper line starts higher; lines never cross at t > 0");
    p.validate();
    return p;
}

CriticalTimes critical_times(const ModelParams& p) {
    p.validate();
    CriticalTimes t;
    t.t_star = (p.q2 - p.q1) / (p.c1 - p.c2);
    const double r = p.hurst / (1.0 - p.hurst);
    t.t1 = r * p.q1 / p.c1;
    t.t2 = r * p.q2 / p.c2;
    return t;
}

Regime classify_regime(const ModelParams& p) {
    const CriticalTimes t = critical_times(p);
    if (rel_equal(t.t_star, t.t1)) return {RegimeTag::BoundaryT1, 1};
    if (rel_equal(t.t_star, t.t2)) return {RegimeTag::BoundaryT2, 2};
    if (t.t_star < t.t1) return {RegimeTag::LeftOfT1, 1};
    if (t.t_star > t.t2) return {RegimeTag::RightOfT2, 2};
    return {RegimeTag::Interior, 0};
}

StructuralConstants structural_constants(const ModelParams& p) {
    const CriticalTimes t = critical_times(p);
    const double H = p.hurst;
    const double ts = t.t_star;
    const double c[2] = {p.c1, p.c2};
    const double q[2] = {p.q1, p.q2};

    StructuralConstants s;
    s.tail_prefactor =
        std::pow(2.0, 0.5 - 1.0 / (2.0 * H)) * std::sqrt(M_PI) / std::sqrt(H * (1.0 - H));
    for (int i = 0; i < 2; ++i) {
        s.tail_arg_coef[i] = std::pow(c[i], H) * std::pow(q[i], 1.0 - H) /
                             (std::pow(H, H) * std::pow(1.0 - H, 1.0 - H));
        s.window_scale[i] = c[i] * c[i] * std::pow(1.0 - H, 2.0 - 1.0 / H) /
                            (std::pow(2.0, 1.0 / (2.0 * H)) * H * H);
    }
    const double level = p.c1 * ts + p.q1;  // common boundary level at the crossing time
    s.peak_coef = level / std::pow(ts, H);

    const double cross = p.c1 * q[1] - q[0] * p.c2;  // c1*q2 - q1*c2 > 0
    const double dc = p.c1 - p.c2;
    s.interior_window = p.T * cross * cross / (2.0 * dc * dc);
    s.drift_pos_slope = (p.c1 * q[1] + q[0] * p.c2 - 2.0 * p.c1 * q[0]) / cross;
    s.drift_neg_slope = (p.c1 * q[1] + p.c2 * q[0] - 2.0 * p.c2 * q[1]) / cross;

    s.interior_window_scale =
        std::pow(level, 1.0 / H) / (std::pow(2.0, 1.0 / (2.0 * H)) * ts * ts);
    const double w1 = std::abs(H * (p.c1 * ts + p.q1) - p.c1 * ts);
    const double w2 = std::abs(H * (p.c2 * ts + p.q2) - p.c2 * ts);
    s.interior_amplitude = (1.0 / w1 + 1.0 / w2) * std::pow(ts, H) *
                           std::pow(s.peak_coef, 1.0 / H - 1.0) /
                           std::pow(2.0, 1.0 / (2.0 * H));
    return s;
}

}  // namespace parisian
