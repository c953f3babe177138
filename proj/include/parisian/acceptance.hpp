#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace parisian {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // measured values, tolerances, timings
    double seconds = 0;
};

struct AcceptanceOptions {
    unsigned threads = 0;  // 0 = hardware default
    bool verbose = true;   // stream per-criterion progress to stderr
};

// Runs the full release checklist (ten numerical criteria) and returns one
// result per criterion.  Each check pins its own workload, seed and tolerance,
// so the suite is bit-reproducible run to run.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// "PASS criterion 3: ..." / "FAIL criterion 3: ..." one line per result.
void print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace parisian
