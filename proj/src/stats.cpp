#include "parisian/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace parisian {

namespace {

// Lentz's continued fraction for the incomplete beta, converges fast for
// x < (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h;
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("reg_incomplete_beta: a, b must be > 0");
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
    if (!(p >= 0) || !(p <= 1)) throw std::invalid_argument("beta_quantile: p must lie in [0,1]");
    if (p == 0) return 0.0;
    if (p == 1) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (reg_incomplete_beta(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

BinomialCI clopper_pearson(std::size_t hits, std::size_t n, double confidence) {
    if (n == 0) throw std::invalid_argument("clopper_pearson: n must be positive");
    if (hits > n) throw std::invalid_argument("clopper_pearson: hits > n");
    const double alpha = 1.0 - confidence;
    if (!(alpha > 0) || !(alpha < 1))
        throw std::invalid_argument("clopper_pearson: confidence must lie in (0,1)");
    BinomialCI ci;
    const double k = static_cast<double>(hits), nn = static_cast<double>(n);
    ci.low = (hits == 0) ? 0.0 : beta_quantile(k, nn - k + 1.0, alpha / 2.0);
    ci.high = (hits == n) ? 1.0 : beta_quantile(k + 1.0, nn - k, 1.0 - alpha / 2.0);
    return ci;
}

}  // namespace parisian
