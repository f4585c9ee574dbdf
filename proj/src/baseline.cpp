#include "tvor/baseline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace tvor {

std::vector<ScoreReport> run_chi2_baseline(std::span<const Histogram> histograms,
                                           double epsilon) {
    if (histograms.size() < 2)
        throw ValidationError("run_chi2_baseline: need at least 2 histograms");
    if (!(epsilon > 0.0))
        throw ValidationError("run_chi2_baseline: epsilon must be positive");
    const std::size_t n = histograms.front().bins();
    for (const auto& h : histograms) {
        h.validate();
        if (h.bins() != n)
            throw ValidationError("run_chi2_baseline: histogram '" + h.label +
                                  "' has " + std::to_string(h.bins()) +
                                  " bins, expected " + std::to_string(n));
    }

    std::vector<double> bin_sums(n, 0.0);
    double grand = 0.0;
    for (const auto& h : histograms)
        for (std::size_t j = 0; j < n; ++j) {
            bin_sums[j] += double(h.counts[j]);
            grand += double(h.counts[j]);
        }

    std::vector<ScoreReport> reports;
    reports.reserve(histograms.size());
    for (const auto& h : histograms) {
        const double s = double(h.total());
        const double rest = grand - s;
        if (rest == 0.0)
            throw ValidationError("run_chi2_baseline: histogram '" + h.label +
                                  "' is the entire data set");
        double chi2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double observed = double(h.counts[j]);
            const double expected = (bin_sums[j] - observed) / rest * s + epsilon;
            const double diff = observed - expected;
            chi2 += diff * diff / expected;
        }
        ScoreReport r;
        r.label = h.label;
        r.size = h.total();
        r.dtv = dtv(h);
        r.score = chi2;
        r.method = ScoreMethod::Chi2;
        reports.push_back(std::move(r));
    }
    assign_ranks(reports);
    return reports;
}

namespace {

int terminal_digit(std::int64_t v) {
    return static_cast<int>(((v % 10) + 10) % 10);
}

bool in_range(std::int64_t v, const std::optional<ValueRange>& range) {
    return !range || (v >= range->first && v <= range->second);
}

} // namespace

double whipple_index(std::span<const std::int64_t> values,
                     std::optional<ValueRange> range) {
    if (range && range->first > range->second)
        throw ValidationError("whipple_index: empty range");
    std::int64_t total = 0, heaped = 0;
    for (std::int64_t v : values) {
        if (!in_range(v, range)) continue;
        ++total;
        const int d = terminal_digit(v);
        if (d == 0 || d == 5) ++heaped;
    }
    if (total == 0)
        throw ValidationError("whipple_index: no values inside the range");
    return 500.0 * double(heaped) / double(total);
}

double myers_index(std::span<const std::int64_t> values,
                   std::optional<ValueRange> range) {
    if (range && range->first > range->second)
        throw ValidationError("myers_index: empty range");
    std::int64_t lowest = 0;
    bool any = false;
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t v : values) {
        if (!in_range(v, range)) continue;
        ++counts[v];
        if (!any || v < lowest) lowest = v;
        any = true;
    }
    if (!any)
        throw ValidationError("myers_index: no values inside the range");
    if (counts.size() < 10)
        throw ValidationError("myers_index: insufficient span (" +
                              std::to_string(counts.size()) +
                              " distinct values, need >= 10)");

    // 10-decade analysis window anchored at the lowest in-range decade;
    // values beyond it do not contribute.
    const std::int64_t anchor =
        lowest >= 0 ? lowest / 10 * 10 : (lowest - 9) / 10 * 10;
    auto count_at = [&](std::int64_t v) {
        auto it = counts.find(v);
        return it == counts.end() ? std::int64_t{0} : it->second;
    };

    std::array<double, 10> blended{};
    double total_blended = 0.0;
    for (int d = 0; d < 10; ++d) {
        std::int64_t sum_low = 0, sum_high = 0;
        for (int decade = 0; decade <= 8; ++decade)
            sum_low += count_at(anchor + 10 * decade + d);
        for (int decade = 1; decade <= 9; ++decade)
            sum_high += count_at(anchor + 10 * decade + d);
        blended[static_cast<std::size_t>(d)] =
            double(d + 1) * double(sum_low) + double(9 - d) * double(sum_high);
        total_blended += blended[static_cast<std::size_t>(d)];
    }
    if (total_blended <= 0.0)
        throw ValidationError("myers_index: analysis window captured no values");

    double index = 0.0;
    for (double b : blended) index += std::abs(100.0 * b / total_blended - 10.0);
    return index / 2.0;
}

} // namespace tvor
