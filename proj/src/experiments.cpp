#include "tvor/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "tvor/parallel.hpp"
#include "tvor/sampling.hpp"

namespace tvor {

const char* to_string(MethodChoice method) {
    switch (method) {
    case MethodChoice::Tvor: return "tvor";
    case MethodChoice::TvorRansac: return "tvor-ransac";
    case MethodChoice::Chi2: return "chi2";
    }
    return "?";
}

MethodChoice method_choice_from_string(std::string_view name) {
    if (name == "tvor") return MethodChoice::Tvor;
    if (name == "tvor-ransac" || name == "ransac") return MethodChoice::TvorRansac;
    if (name == "chi2" || name == "baseline") return MethodChoice::Chi2;
    throw ValidationError("unknown method '" + std::string(name) + "'");
}

double MeanRankResult::mean_rank(MethodChoice m) const {
    for (const auto& [method, rank] : mean_ranks)
        if (method == m) return rank;
    throw ValidationError("method not present in result");
}

namespace {

// Stream tags keep the per-(trial, histogram) derivations distinct.
constexpr std::uint64_t kSizeTag = 1;
constexpr std::uint64_t kSampleTag = 2;
constexpr std::uint64_t kHeapTag = 3;
constexpr std::uint64_t kRansacTag = 4;

double outlier_mean_rank(const std::vector<ScoreReport>& reports,
                         std::size_t inliers) {
    double sum = 0.0;
    for (std::size_t i = inliers; i < reports.size(); ++i)
        sum += double(reports[i].rank);
    return sum / double(reports.size() - inliers);
}

MeanRankResult run_experiment(const ExperimentConfig& cfg, bool heaping) {
    if (cfg.inlier_count < 1 || cfg.outlier_count < 1)
        throw ValidationError("experiment: inlier and outlier counts must be >= 1");
    if (cfg.size_min < 1 || cfg.size_min > cfg.size_max)
        throw ValidationError("experiment: need 1 <= size_min <= size_max");
    if (cfg.trials < 1)
        throw ValidationError("experiment: trials must be >= 1");
    if (cfg.methods.empty())
        throw ValidationError("experiment: no methods requested");
    if (heaping && (cfg.heap_fraction < 0.0 || cfg.heap_fraction > 1.0))
        throw ValidationError("experiment: heap fraction must lie in [0, 1]");

    // Outlier histograms must share the inlier bins.
    const std::size_t inlier_bins = cfg.inlier_spec.bin_probabilities().size();
    const std::size_t outlier_bins = cfg.outlier_spec.bin_probabilities().size();
    if (inlier_bins != outlier_bins)
        throw ValidationError(
            "experiment: inlier and outlier specs yield different bins (" +
            std::to_string(inlier_bins) + " vs " + std::to_string(outlier_bins) + ")");

    const int total = cfg.inlier_count + cfg.outlier_count;
    const auto span = static_cast<std::uint64_t>(cfg.size_max - cfg.size_min + 1);

    std::vector<std::vector<double>> per_trial(
        cfg.methods.size(), std::vector<double>(static_cast<std::size_t>(cfg.trials)));

    parallel_for(cfg.trials, cfg.threads, [&](std::int64_t trial) {
        std::vector<Histogram> hists;
        hists.reserve(static_cast<std::size_t>(total));
        for (int j = 0; j < total; ++j) {
            const auto jj = static_cast<std::uint64_t>(j);
            SplitMix64 size_rng(
                derive(cfg.seed, static_cast<std::uint64_t>(trial), jj, kSizeTag));
            const std::int64_t size =
                cfg.size_min + static_cast<std::int64_t>(size_rng.below(span));
            const bool is_outlier = j >= cfg.inlier_count;
            const DistributionSpec& spec =
                (is_outlier && !heaping) ? cfg.outlier_spec : cfg.inlier_spec;
            Histogram h = sample(
                spec, size,
                derive(cfg.seed, static_cast<std::uint64_t>(trial), jj, kSampleTag));
            if (heaping && is_outlier)
                h = apply_heaping(
                    h, cfg.heap_fraction, cfg.heap_period,
                    derive(cfg.seed, static_cast<std::uint64_t>(trial), jj, kHeapTag));
            h.label = (is_outlier ? "outlier-" : "inlier-") + std::to_string(j);
            hists.push_back(std::move(h));
        }

        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            std::vector<ScoreReport> reports;
            switch (cfg.methods[mi]) {
            case MethodChoice::Tvor:
                reports = run_tvor(hists);
                break;
            case MethodChoice::TvorRansac: {
                TvorOptions opt;
                opt.use_ransac = true;
                opt.ransac = cfg.ransac;
                opt.seed = derive(cfg.seed, static_cast<std::uint64_t>(trial), 0,
                                  kRansacTag);
                reports = run_tvor(hists, opt);
                break;
            }
            case MethodChoice::Chi2:
                reports = run_chi2_baseline(hists, cfg.chi2_epsilon);
                break;
            }
            per_trial[mi][static_cast<std::size_t>(trial)] =
                outlier_mean_rank(reports, static_cast<std::size_t>(cfg.inlier_count));
        }
    });

    MeanRankResult result;
    result.trials = cfg.trials;
    result.total_histograms = total;
    result.ideal = double(cfg.outlier_count - 1) / 2.0;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        double sum = 0.0;
        for (double v : per_trial[mi]) sum += v;
        result.mean_ranks.emplace_back(cfg.methods[mi], sum / double(cfg.trials));
    }
    return result;
}

} // namespace

MeanRankResult run_distribution_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, false);
}

MeanRankResult run_heaping_experiment(const ExperimentConfig& cfg) {
    if (cfg.heap_period < 1)
        throw ValidationError("experiment: heap period must be >= 1");
    return run_experiment(cfg, true);
}

Histogram per_year_histogram(const ValueList& list, std::int64_t year_min,
                             std::int64_t year_max) {
    if (year_min > year_max)
        throw ValidationError("per_year_histogram: empty year range");
    Histogram h;
    h.label = list.label;
    h.counts.assign(static_cast<std::size_t>(year_max - year_min + 1), 0);
    for (std::int64_t v : list.values) {
        if (v < year_min || v > year_max)
            throw ValidationError("per_year_histogram: value " + std::to_string(v) +
                                  " outside [" + std::to_string(year_min) + ", " +
                                  std::to_string(year_max) + "]");
        ++h.counts[static_cast<std::size_t>(v - year_min)];
    }
    return h;
}

CensusResult run_census_pipeline(std::span<const ValueList> lists,
                                 const CensusOptions& options) {
    CensusResult result;
    std::vector<const ValueList*> usable;
    for (const auto& list : lists) {
        if (list.values.empty()) {
            result.warnings.push_back("list '" + list.label + "' is empty; skipped");
            continue;
        }
        usable.push_back(&list);
    }
    if (usable.size() < 2)
        throw ValidationError("run_census_pipeline: need at least 2 non-empty lists");

    bool first = true;
    for (const ValueList* list : usable)
        for (std::int64_t v : list->values) {
            if (first || v < result.year_min) result.year_min = v;
            if (first || v > result.year_max) result.year_max = v;
            first = false;
        }

    result.histograms.reserve(usable.size());
    for (const ValueList* list : usable)
        result.histograms.push_back(
            per_year_histogram(*list, result.year_min, result.year_max));

    TvorOptions opt;
    opt.use_ransac = options.use_ransac;
    opt.ransac = options.ransac;
    opt.seed = options.seed;
    opt.degenerate_fallback = true;
    bool single_size = true;
    for (const auto& h : result.histograms)
        single_size = single_size && h.total() == result.histograms.front().total();
    if (single_size)
        result.warnings.push_back(
            "all lists share one sample size; using the degenerate single-size "
            "model (predicts the mean DTV)");
    result.model = fit_tvor_model(result.histograms, opt);
    result.d1.reserve(result.histograms.size());
    for (const auto& h : result.histograms) {
        ScoreReport r;
        r.label = h.label;
        r.size = h.total();
        r.dtv = dtv(h);
        r.predicted = result.model.predict(double(r.size));
        r.score = score_d1(h, result.model);
        r.method = ScoreMethod::TvorD1;
        result.d1.push_back(std::move(r));
    }
    assign_ranks(result.d1);

    for (const auto& r : result.d1)
        result.scatter.push_back({r.label, r.size, r.dtv, *r.predicted});

    if (options.reference_table) {
        std::vector<Histogram> scorable;
        for (const auto& h : result.histograms) {
            try {
                score_d2(h, *options.reference_table, options.allow_extrapolation);
                scorable.push_back(h);
            } catch (const ValidationError& e) {
                result.warnings.push_back("d2 skipped for '" + h.label +
                                          "': " + e.what());
            }
        }
        if (scorable.size() >= 2)
            result.d2 = score_with_mc_table(scorable, *options.reference_table,
                                            options.allow_extrapolation);
        else if (!scorable.empty())
            result.warnings.push_back(
                "d2 ranking skipped: fewer than 2 lists inside the table range");
    }
    return result;
}

PartitionResult run_partition_analysis(
    std::span<const ValueList> comparison,
    std::span<const std::pair<std::int64_t, std::string>> grouped_values,
    const TvorOptions& options) {
    if (grouped_values.empty())
        throw ValidationError("run_partition_analysis: no grouped values");

    std::map<std::string, std::vector<std::int64_t>> groups;
    for (const auto& [value, group] : grouped_values)
        groups[group].push_back(value);

    PartitionResult result;
    std::int64_t lo = 0, hi = 0;
    bool first = true;
    auto fold = [&](std::int64_t v) {
        if (first || v < lo) lo = v;
        if (first || v > hi) hi = v;
        first = false;
    };
    std::vector<const ValueList*> usable;
    for (const auto& list : comparison) {
        if (list.values.empty()) {
            result.warnings.push_back("list '" + list.label + "' is empty; skipped");
            continue;
        }
        usable.push_back(&list);
        for (std::int64_t v : list.values) fold(v);
    }
    for (const auto& [name, values] : groups)
        for (std::int64_t v : values) fold(v);
    if (first)
        throw ValidationError("run_partition_analysis: no values at all");

    std::vector<Histogram> hists;
    hists.reserve(usable.size() + groups.size());
    for (const ValueList* list : usable)
        hists.push_back(per_year_histogram(*list, lo, hi));
    for (const auto& [name, values] : groups) {
        ValueList vl{"group:" + name, values};
        result.group_indices.push_back(hists.size());
        hists.push_back(per_year_histogram(vl, lo, hi));
    }
    if (hists.size() < 2)
        throw ValidationError("run_partition_analysis: need at least 2 histograms");

    result.reports = run_tvor(hists, options);
    return result;
}

} // namespace tvor
