#pragma once

#include <stdexcept>
#include <string>

namespace parisian {

// Barrier lines do not cross at a positive time, so the two-company problem
// degenerates to a one-company one and the two-dimensional machinery refuses it.
struct NonIntersectingBarriers : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested grid would exceed the hard cap on point count.
struct StepTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Covariance matrix failed Cholesky factorization even after jitter escalation.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An asymptotic formula needs a simulated constant that was not supplied.
struct MissingConstant : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A formula was requested outside the parameter regime where it holds.
struct WrongRegime : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Constant-store file is unreadable at the container level (individual bad
// lines are skipped with a warning instead).
struct StoreCorrupt : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sampled sequence shows no stable limit within tolerance.
struct NotConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace parisian
