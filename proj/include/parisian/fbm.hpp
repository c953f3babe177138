#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace parisian {

// Uniform time grid.  Points are anchored at integer multiples of `step` when
// 0 lies in [lo, hi], so 0 is always an exact grid point there.
struct Grid {
    double lo = 0, hi = 0, step = 0;
    std::vector<double> points;
    std::ptrdiff_t zero_index = -1;  // index of the t == 0 point, -1 if absent
    std::size_t size() const { return points.size(); }
};

// Throws StepTooSmall when the grid would exceed 2^22 points.
Grid build_grid(double lo, double hi, double step);

// Covariance of two-sided fractional Brownian motion at the given times:
// entry (i,j) = (|ti|^2H + |tj|^2H - |ti-tj|^2H) / 2.  Times must be strictly
// increasing and must not contain 0 (the path is pinned to 0 there).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> fbm_covariance(
    Scalar hurst, const std::vector<Scalar>& times) {
    if (times.empty()) throw std::invalid_argument("fbm_covariance: empty time vector");
    const Scalar two_h = 2 * hurst;
    const auto n = static_cast<Eigen::Index>(times.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar ti = times[static_cast<std::size_t>(i)];
        if (ti == Scalar(0))
            throw std::invalid_argument("fbm_covariance: times must exclude 0");
        if (i > 0 && !(ti > times[static_cast<std::size_t>(i - 1)]))
            throw std::invalid_argument("fbm_covariance: times must be strictly increasing");
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Scalar tj = times[static_cast<std::size_t>(j)];
            using std::abs, std::pow;
            const Scalar v = (pow(abs(ti), two_h) + pow(abs(tj), two_h) -
                              pow(abs(ti - tj), two_h)) / Scalar(2);
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    return cov;
}

struct CholeskyResult {
    Eigen::MatrixXd factor;  // lower triangular, factor * factor^T ~ input
    double jitter = 0;       // diagonal shift that was needed, 0 if none
};

// Plain LLT first, then diagonal jitter escalating 1e-12 -> 1e-10 -> 1e-8;
// throws NotPositiveDefinite if all attempts fail.
CholeskyResult cholesky_factor(const Eigen::MatrixXd& cov);

// Draws Gaussian paths at fixed times.  Column j of the output is the path of
// replication first_rep + j, generated from a stream keyed by (seed, rep), so
// any partition of replications over threads yields identical paths.
class PathSampler {
  public:
    // Exact fBm via Cholesky of the covariance at the non-zero times.
    static PathSampler fbm(double hurst, std::vector<double> times);
    // Exact Brownian motion via independent increments away from t = 0
    // (two-sided: the negative half is an independent branch).
    static PathSampler bm(std::vector<double> times);

    // out must have times().size() rows; fills one column per replication.
    void sample_into(Eigen::Ref<Eigen::MatrixXd> out, std::uint64_t seed,
                     std::uint64_t first_rep) const;

    const std::vector<double>& times() const { return times_; }
    double jitter() const { return jitter_; }
    double hurst() const { return hurst_; }

  private:
    PathSampler() = default;
    std::vector<double> times_;
    double hurst_ = 0.5;
    double jitter_ = 0;
    bool use_increments_ = false;
    std::ptrdiff_t zero_index_ = -1;
    std::vector<std::size_t> nonzero_rows_;  // rows of `times_` entering the factor
    Eigen::MatrixXd factor_;                 // Cholesky mode only
    std::vector<double> sqrt_steps_;         // increment mode: sqrt of gaps, in draw order
    std::size_t n_pos_ = 0;                  // increment mode: cumsum restarts here (negative branch)
};

// Batch of simulated paths on a grid; values is n_points x n_paths (one column
// per path) and the t == 0 row, when present, is exactly zero.
struct PathBatch {
    enum class Kind { Fbm, Bm };
    Grid grid;
    double hurst = 0.5;
    Kind kind = Kind::Bm;
    std::uint64_t seed = 0;
    Eigen::MatrixXd values;
};

// Exact fBm paths on the grid (Cholesky of the grid covariance).
PathBatch sample_paths(double hurst, const Grid& grid, std::size_t n_paths, std::uint64_t seed);

// Brownian-motion fast path: cumulative independent increments, no matrix work.
PathBatch sample_bm_paths(const Grid& grid, std::size_t n_paths, std::uint64_t seed);

// Writes "t,path_0,...,path_{n-1}" rows with 17 significant digits.
void dump_csv(const PathBatch& batch, const std::string& path);

// Midpoint (bridge) refinement of Brownian paths on a uniform grid: returns
// paths on the half-step grid that contain every original value, with the new
// midpoints drawn conditionally given their neighbours.  Path suprema can only
// grow under this nesting.  Replication r draws from a stream keyed (seed, r).
PathBatch refine_bm_paths(const PathBatch& coarse, std::uint64_t seed);

}  // namespace parisian
