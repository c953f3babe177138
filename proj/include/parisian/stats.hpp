#pragma once

#include <cstddef>

namespace parisian {

// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double reg_incomplete_beta(double a, double b, double x);

// Quantile of the Beta(a, b) distribution by bisection on I_x.
double beta_quantile(double a, double b, double p);

struct BinomialCI {
    double low = 0, high = 1;
};

// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
// proportion.
BinomialCI clopper_pearson(std::size_t hits, std::size_t n, double confidence = 0.95);

}  // namespace parisian
