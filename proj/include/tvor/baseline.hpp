#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tvor/histogram.hpp"
#include "tvor/model.hpp"

namespace tvor {

// Leave-one-out Pearson chi-squared scoring. For histogram i the expected
// bin j value is (b_j - x_j) / (S - s_i) * s_i + epsilon, where b_j sums
// bin j over all histograms and S is the grand total.
std::vector<ScoreReport> run_chi2_baseline(std::span<const Histogram> histograms,
                                           double epsilon = 1e-6);

using ValueRange = std::pair<std::int64_t, std::int64_t>; // inclusive

// Whipple's index: 100 * 5 * (in-range values ending in 0 or 5) / (in-range
// values). 100 means no digit preference, 500 total preference. The range
// defaults to all values; the classical age window can be passed explicitly.
double whipple_index(std::span<const std::int64_t> values,
                     std::optional<ValueRange> range = std::nullopt);

// Myers' blended index over a 10-decade window anchored at the lowest
// in-range decade. 0 means no digit preference, 90 means total preference.
// Requires at least 10 distinct in-range values.
double myers_index(std::span<const std::int64_t> values,
                   std::optional<ValueRange> range = std::nullopt);

} // namespace tvor
