#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvor/baseline.hpp"
#include "tvor/distribution.hpp"
#include "tvor/model.hpp"

namespace tvor {

enum class MethodChoice { Tvor, TvorRansac, Chi2 };
const char* to_string(MethodChoice method);
MethodChoice method_choice_from_string(std::string_view name);

struct ExperimentConfig {
    DistributionSpec inlier_spec;
    int inlier_count = 100;
    DistributionSpec outlier_spec;
    int outlier_count = 1;
    std::int64_t size_min = 500;
    std::int64_t size_max = 1000;
    double heap_fraction = 0.0; // heaping experiment only
    int heap_period = 5;
    std::int64_t trials = 1000;
    RngSeed seed;
    std::vector<MethodChoice> methods{MethodChoice::Tvor, MethodChoice::Chi2};
    RansacParams ransac;
    double chi2_epsilon = 1e-6;
    int threads = 1;
};

struct MeanRankResult {
    std::vector<std::pair<MethodChoice, double>> mean_ranks;
    double ideal = 0.0; // (K-1)/2 for K outliers
    std::int64_t trials = 0;
    int total_histograms = 0;

    double mean_rank(MethodChoice m) const;
};

// Planted-outlier protocol: each trial generates inlier and outlier samples
// with sizes uniform in [size_min, size_max], scores the pooled set with
// every requested method, and records the 0-based mean rank of the planted
// outliers; results are averaged over trials. Fixed seeds give bit-identical
// reruns regardless of thread count.
MeanRankResult run_distribution_experiment(const ExperimentConfig& cfg);

// Same protocol, but outliers are inlier-distribution samples passed through
// the heaping transform.
MeanRankResult run_heaping_experiment(const ExperimentConfig& cfg);

struct ValueList {
    std::string label;
    std::vector<std::int64_t> values;
};

struct CensusOptions {
    bool use_ransac = false;
    RansacParams ransac;
    RngSeed seed;
    const McTable* reference_table = nullptr; // enables d'' scoring
    bool allow_extrapolation = false;
};

struct ScatterRow {
    std::string label;
    std::int64_t size = 0;
    std::int64_t dtv = 0;
    double predicted = 0.0;
};

struct CensusResult {
    std::int64_t year_min = 0;
    std::int64_t year_max = 0;
    std::vector<Histogram> histograms; // one bin per year over the global range
    DtvModel model;
    std::vector<ScoreReport> d1;
    std::vector<ScoreReport> d2; // empty without a reference table
    std::vector<ScatterRow> scatter;
    std::vector<std::string> warnings;
};

// Builds one birth-year histogram per list over the global year range and
// ranks the set with d' (and d'' against the reference table when given).
// Empty lists are skipped with a warning.
CensusResult run_census_pipeline(std::span<const ValueList> lists,
                                 const CensusOptions& options = {});

// Histogram of one list over [year_min, year_max], one bin per year.
Histogram per_year_histogram(const ValueList& list, std::int64_t year_min,
                             std::int64_t year_max);

struct PartitionResult {
    std::vector<ScoreReport> reports;       // whole extended comparison set
    std::vector<std::size_t> group_indices; // positions of the group entries
    std::vector<std::string> warnings;
};

// Splits a value list by group, appends the per-group histograms to the
// comparison set, re-runs the d' scoring, and reports every group's score
// and rank within the extended set. Groups with no values are skipped.
PartitionResult run_partition_analysis(
    std::span<const ValueList> comparison,
    std::span<const std::pair<std::int64_t, std::string>> grouped_values,
    const TvorOptions& options = {});

} // namespace tvor
