#include <iostream>

#include "parisian/acceptance.hpp"

int main() {
    const auto results = parisian::run_acceptance({});
    parisian::print_acceptance(std::cout, results);
    for (const auto& r : results)
        if (!r.passed) return 1;
    return 0;
}
