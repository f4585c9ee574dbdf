#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvor/distribution.hpp"
#include "tvor/histogram.hpp"
#include "tvor/rng.hpp"

namespace tvor {

enum class FitKind { LeastSquares, Ransac };

const char* to_string(FitKind kind);
FitKind fit_kind_from_string(std::string_view name);

// Expected-DTV model m(N) = a N + b sqrt(N).
struct DtvModel {
    double a = 0.0;
    double b = 0.0;
    FitKind fit_kind = FitKind::LeastSquares;
    std::optional<std::vector<bool>> inlier_mask;
    double residual_scale = 0.0; // RMS of |v - m(N)| / sqrt(N) over fitted points

    double predict(double size) const { return a * size + b * std::sqrt(size); }
};

struct FitPoint {
    double size = 0.0;
    double dtv = 0.0;
};

// Ordinary least squares over the basis {N, sqrt(N)}, no intercept.
// Requires at least two points with distinct positive sizes; otherwise
// throws RankDeficientError.
DtvModel fit_model(std::span<const FitPoint> points);

struct RansacParams {
    double threshold = 2.0; // in d' units, i.e. residual / sqrt(N)
    int iterations = 500;
    int min_points = 0;     // 0 -> max(10, 20% of points)
};

// Classic RANSAC with minimal subsets of size 2 (the model has two
// parameters): fit each candidate pair, count inliers within `threshold`,
// refit on the largest consensus set. Throws NumericalGuardError when no
// consensus of size >= min_points emerges.
DtvModel fit_model_ransac(std::span<const FitPoint> points,
                          const RansacParams& params, RngSeed seed);

// d' = |dtv(h) - m(N)| / sqrt(N); N must be >= 1.
double score_d1(const Histogram& h, const DtvModel& model);

enum class ScoreMethod { TvorD1, McD2, Chi2, Whipple, Myers };
const char* to_string(ScoreMethod method);

struct ScoreReport {
    std::string label;
    std::int64_t size = 0;
    std::int64_t dtv = 0;
    std::optional<double> predicted;
    double score = 0.0;
    int rank = -1;
    ScoreMethod method = ScoreMethod::TvorD1;
};

// 0-based ranks by descending score; ties keep input order.
void assign_ranks(std::vector<ScoreReport>& reports);

struct TvorOptions {
    bool use_ransac = false;
    RansacParams ransac;
    RngSeed seed;
    // Extra (size, dtv) points appended to the fit data (e.g. subsample
    // augmentation); scores are still computed for the input histograms only.
    std::vector<FitPoint> extra_fit_points;
    // When every histogram shares one sample size the design is rank
    // deficient. With this flag the fit degrades to the single-size model
    // that predicts the mean DTV (b = 0) instead of throwing.
    bool degenerate_fallback = false;
};

// Algorithm: compute sizes and DTVs, fit the model on the whole input
// (or its RANSAC consensus), then score every histogram with d'.
std::vector<ScoreReport> run_tvor(std::span<const Histogram> histograms,
                                  const TvorOptions& options = {});
DtvModel fit_tvor_model(std::span<const Histogram> histograms,
                        const TvorOptions& options = {});

struct McRow {
    std::int64_t size = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::int64_t trials = 0;
};

// Monte Carlo lookup of sample size -> (mean DTV, std DTV).
struct McTable {
    std::vector<McRow> rows; // sorted by size
    std::string source;
    RngSeed base_seed;

    const McRow* find(std::int64_t size) const;
};

McTable build_mc_table(const DistributionSpec& spec,
                       std::span<const std::int64_t> sizes, std::int64_t trials,
                       RngSeed seed, int threads = 1);
// Pooled mode: trials draw subsamples (without replacement) of the pool.
McTable build_mc_table(const Histogram& pool, std::span<const std::int64_t> sizes,
                       std::int64_t trials, RngSeed seed, int threads = 1);

// d'' = |dtv(h) - mu_N| / sigma_N. Between table rows, mu and sigma are
// interpolated linearly in sqrt(N); outside the table range the call is
// rejected unless allow_extrapolation is set. Rows with sigma below 1e-9
// are rejected with NumericalGuardError.
double score_d2(const Histogram& h, const McTable& table,
                bool allow_extrapolation = false);

std::vector<ScoreReport> score_with_mc_table(std::span<const Histogram> histograms,
                                             const McTable& table,
                                             bool allow_extrapolation = false);

// Least squares of sigma_N against sqrt(N) through the origin.
double fit_stderr_model(const McTable& table);

} // namespace tvor
