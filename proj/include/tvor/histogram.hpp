#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tvor/errors.hpp"

namespace tvor {

// Bin counts of one sample over a shared binning. Counts are non-negative;
// the sample size N is their sum.
struct Histogram {
    std::vector<std::int64_t> counts;
    std::string label;

    std::size_t bins() const { return counts.size(); }

    std::int64_t total() const {
        return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    }

    void validate() const {
        if (counts.empty())
            throw ValidationError("histogram '" + label + "' has no bins");
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] < 0)
                throw ValidationError("histogram '" + label + "' bin " +
                                      std::to_string(i) + " has negative count");
    }
};

// Sum of absolute differences between neighboring bins; 0 for a single bin.
std::int64_t dtv(const Histogram& h);

// dtv plus the wrap-around term |first - last|. Requires at least 2 bins.
std::int64_t circular_dtv(const Histogram& h);

} // namespace tvor
