#include "parisian/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "parisian/errors.hpp"
#include "parisian/rng.hpp"

namespace parisian {

namespace {
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 22;
}

Grid build_grid(double lo, double hi, double step) {
    if (!(step > 0) || !std::isfinite(step))
        throw std::invalid_argument("build_grid: step must be positive and finite");
    if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("build_grid: need finite lo <= hi");
    const double span = (hi - lo) / step;
    if (span > static_cast<double>(kMaxGridPoints))
        throw StepTooSmall("build_grid: grid would exceed 2^22 points");

    Grid g;
    g.lo = lo;
    g.hi = hi;
    g.step = step;
    if (lo <= 0.0 && 0.0 <= hi) {
        // Anchor at 0 so t = 0 is an exact grid point; the far end rounds to
        // the nearest multiple of step (never further than step/2 from hi).
        const auto k_lo = static_cast<long long>(std::ceil(lo / step - 1e-9));
        const auto k_hi = static_cast<long long>(std::floor(hi / step + 0.5 - 1e-9));
        g.points.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
        for (long long k = k_lo; k <= k_hi; ++k) {
            if (k == 0) {
                g.zero_index = static_cast<std::ptrdiff_t>(g.points.size());
                g.points.push_back(0.0);
            } else {
                g.points.push_back(static_cast<double>(k) * step);
            }
        }
    } else {
        const auto count = static_cast<long long>(std::floor((hi - lo) / step + 0.5 - 1e-9));
        for (long long k = 0; k <= count; ++k) g.points.push_back(lo + static_cast<double>(k) * step);
    }
    if (g.points.empty()) throw std::invalid_argument("build_grid: empty grid");
    return g;
}

CholeskyResult cholesky_factor(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0)
        throw std::invalid_argument("cholesky_factor: need a nonempty square matrix");
    for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
        Eigen::MatrixXd work = cov;
        if (jitter > 0) work.diagonal().array() += jitter;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);  // factorizes in place
        if (llt.info() == Eigen::Success) {
            work.triangularView<Eigen::StrictlyUpper>().setZero();
            return {std::move(work), jitter};
        }
    }
    throw NotPositiveDefinite("cholesky_factor: factorization failed even with jitter 1e-8");
}

PathSampler PathSampler::fbm(double hurst, std::vector<double> times) {
    if (!(hurst > 0) || !(hurst < 1))
        throw std::invalid_argument("PathSampler::fbm: hurst must lie in (0,1)");
    PathSampler s;
    s.hurst_ = hurst;
    s.times_ = std::move(times);
    std::vector<double> reduced;
    reduced.reserve(s.times_.size());
    for (std::size_t i = 0; i < s.times_.size(); ++i) {
        if (s.times_[i] == 0.0) {
            s.zero_index_ = static_cast<std::ptrdiff_t>(i);
        } else {
            s.nonzero_rows_.push_back(i);
            reduced.push_back(s.times_[i]);
        }
    }
    if (reduced.empty()) throw std::invalid_argument("PathSampler::fbm: no non-zero times");
    auto chol = cholesky_factor(fbm_covariance<double>(hurst, reduced));
    s.factor_ = std::move(chol.factor);
    s.jitter_ = chol.jitter;
    return s;
}

PathSampler PathSampler::bm(std::vector<double> times) {
    PathSampler s;
    s.hurst_ = 0.5;
    s.use_increments_ = true;
    s.times_ = std::move(times);
    for (std::size_t i = 1; i < s.times_.size(); ++i)
        if (!(s.times_[i] > s.times_[i - 1]))
            throw std::invalid_argument("PathSampler::bm: times must be strictly increasing");
    // Positive side first (ascending from 0), then the independent negative
    // branch (descending from 0); each draw advances one grid gap.
    std::size_t zero_or_split = s.times_.size();
    for (std::size_t i = 0; i < s.times_.size(); ++i) {
        if (s.times_[i] == 0.0) s.zero_index_ = static_cast<std::ptrdiff_t>(i);
        if (s.times_[i] >= 0.0) { zero_or_split = i; break; }
    }
    double prev = 0.0;
    for (std::size_t i = zero_or_split; i < s.times_.size(); ++i) {
        if (s.times_[i] == 0.0) { prev = 0.0; continue; }
        s.nonzero_rows_.push_back(i);
        s.sqrt_steps_.push_back(std::sqrt(s.times_[i] - prev));
        prev = s.times_[i];
    }
    s.n_pos_ = s.nonzero_rows_.size();
    prev = 0.0;
    for (std::size_t j = zero_or_split; j-- > 0;) {
        s.nonzero_rows_.push_back(j);
        s.sqrt_steps_.push_back(std::sqrt(prev - s.times_[j]));
        prev = s.times_[j];
    }
    if (s.nonzero_rows_.empty())
        throw std::invalid_argument("PathSampler::bm: no non-zero times");
    return s;
}

void PathSampler::sample_into(Eigen::Ref<Eigen::MatrixXd> out, std::uint64_t seed,
                              std::uint64_t first_rep) const {
    if (static_cast<std::size_t>(out.rows()) != times_.size())
        throw std::invalid_argument("PathSampler::sample_into: row count mismatch");
    const auto cols = out.cols();
    if (use_increments_) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            auto rng = rep_rng(seed, first_rep + static_cast<std::uint64_t>(c));
            std::normal_distribution<double> gauss;
            double acc = 0.0;
            for (std::size_t k = 0; k < nonzero_rows_.size(); ++k) {
                if (k == n_pos_) acc = 0.0;
                acc += sqrt_steps_[k] * gauss(rng);
                out(static_cast<Eigen::Index>(nonzero_rows_[k]), c) = acc;
            }
            if (zero_index_ >= 0) out(zero_index_, c) = 0.0;
        }
        return;
    }
    const auto m = factor_.rows();
    // One matrix-vector product per replication: a batched product would be
    // faster, but its rounding depends on the batch width, and results must
    // not change with how replications are grouped (threading, blocking).
    Eigen::VectorXd z(m), path(m);
    for (Eigen::Index c = 0; c < cols; ++c) {
        auto rng = rep_rng(seed, first_rep + static_cast<std::uint64_t>(c));
        std::normal_distribution<double> gauss;
        for (Eigen::Index i = 0; i < m; ++i) z(i) = gauss(rng);
        path.noalias() = factor_.triangularView<Eigen::Lower>() * z;
        for (std::size_t k = 0; k < nonzero_rows_.size(); ++k)
            out(static_cast<Eigen::Index>(nonzero_rows_[k]), c) =
                path(static_cast<Eigen::Index>(k));
    }
    if (zero_index_ >= 0) out.row(zero_index_).setZero();
}

namespace {

PathBatch run_sampler(const PathSampler& sampler, const Grid& grid, std::size_t n_paths,
                      std::uint64_t seed, PathBatch::Kind kind) {
    PathBatch batch;
    batch.grid = grid;
    batch.hurst = sampler.hurst();
    batch.kind = kind;
    batch.seed = seed;
    batch.values.resize(static_cast<Eigen::Index>(grid.size()),
                        static_cast<Eigen::Index>(n_paths));
    if (n_paths > 0) sampler.sample_into(batch.values, seed, 0);
    return batch;
}

}  // namespace

PathBatch sample_paths(double hurst, const Grid& grid, std::size_t n_paths, std::uint64_t seed) {
    return run_sampler(PathSampler::fbm(hurst, grid.points), grid, n_paths, seed,
                       PathBatch::Kind::Fbm);
}

PathBatch sample_bm_paths(const Grid& grid, std::size_t n_paths, std::uint64_t seed) {
    return run_sampler(PathSampler::bm(grid.points), grid, n_paths, seed, PathBatch::Kind::Bm);
}

PathBatch refine_bm_paths(const PathBatch& coarse, std::uint64_t seed) {
    if (coarse.hurst != 0.5)
        throw std::invalid_argument("refine_bm_paths: only Brownian (H = 1/2) paths");
    const std::size_t m = coarse.grid.size();
    if (m < 2) throw std::invalid_argument("refine_bm_paths: need at least two grid points");
    PathBatch fine;
    fine.hurst = 0.5;
    fine.kind = PathBatch::Kind::Bm;
    fine.seed = seed;
    fine.grid = build_grid(coarse.grid.lo, coarse.grid.hi, coarse.grid.step / 2.0);
    if (fine.grid.size() != 2 * m - 1)
        throw std::invalid_argument("refine_bm_paths: grid is not uniform");
    const auto cols = coarse.values.cols();
    fine.values.resize(static_cast<Eigen::Index>(2 * m - 1), cols);
    const double mid_sd = std::sqrt(coarse.grid.step / 4.0);
    for (Eigen::Index c = 0; c < cols; ++c) {
        auto rng = rep_rng(seed, static_cast<std::uint64_t>(c));
        std::normal_distribution<double> gauss;
        for (std::size_t i = 0; i < m; ++i)
            fine.values(static_cast<Eigen::Index>(2 * i), c) =
                coarse.values(static_cast<Eigen::Index>(i), c);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const double avg = 0.5 * (coarse.values(static_cast<Eigen::Index>(i), c) +
                                      coarse.values(static_cast<Eigen::Index>(i + 1), c));
            fine.values(static_cast<Eigen::Index>(2 * i + 1), c) = avg + mid_sd * gauss(rng);
        }
    }
    if (fine.grid.zero_index >= 0) fine.values.row(fine.grid.zero_index).setZero();
    return fine;
}

void dump_csv(const PathBatch& batch, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("dump_csv: cannot open " + path);
    std::fputs("t", f);
    for (Eigen::Index j = 0; j < batch.values.cols(); ++j)
        std::fprintf(f, ",path_%lld", static_cast<long long>(j));
    std::fputc('\n', f);
    for (std::size_t i = 0; i < batch.grid.size(); ++i) {
        std::fprintf(f, "%.17g", batch.grid.points[i]);
        for (Eigen::Index j = 0; j < batch.values.cols(); ++j)
            std::fprintf(f, ",%.17g", batch.values(static_cast<Eigen::Index>(i), j));
        std::fputc('\n', f);
    }
    std::fclose(f);
}

}  // namespace parisian
