#pragma once

#include <cmath>
#include <stdexcept>

namespace parisian {

// Standard normal CDF via erfc; keeps full relative accuracy deep into the
// lower tail (erfc underflows only around x ~ -37.6).
template <typename Scalar = double>
Scalar normal_cdf(Scalar x) {
    return Scalar(0.5) * std::erfc(-x / std::sqrt(Scalar(2)));
}

// Upper tail P(N(0,1) > x).
template <typename Scalar = double>
Scalar normal_tail(Scalar x) {
    return Scalar(0.5) * std::erfc(x / std::sqrt(Scalar(2)));
}

// Leading-order tail approximation exp(-x^2/2) / (sqrt(2 pi) x), x > 0 only.
template <typename Scalar = double>
Scalar normal_tail_asymptotic(Scalar x) {
    if (!(x > Scalar(0))) throw std::domain_error("normal_tail_asymptotic: requires x > 0");
    const Scalar sqrt_2pi = std::sqrt(Scalar(2) * Scalar(M_PI));
    return std::exp(-x * x / Scalar(2)) / (sqrt_2pi * x);
}

template <typename Scalar = double>
Scalar normal_pdf(Scalar x) {
    const Scalar sqrt_2pi = std::sqrt(Scalar(2) * Scalar(M_PI));
    return std::exp(-x * x / Scalar(2)) / sqrt_2pi;
}

}  // namespace parisian
