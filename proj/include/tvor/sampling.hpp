#pragma once

#include <cstdint>

#include "tvor/distribution.hpp"
#include "tvor/histogram.hpp"
#include "tvor/rng.hpp"

namespace tvor {

// Draws `size` i.i.d. values from the spec and bins them. Out-of-range
// handling (clamp/discard) is already folded into the spec's bin
// probabilities, so this is an exact categorical draw over p_1..p_n.
Histogram sample(const DistributionSpec& spec, std::int64_t size, RngSeed seed);

// Uniform subsample without replacement from the multiset the histogram
// represents; result has the same bins and sum == size.
Histogram subsample(const Histogram& h, std::int64_t size, RngSeed seed);

// Simulates digit heaping: floor(fraction * N) times, pick a random item
// (bin chosen proportionally to its current count), move it to the nearest
// bin whose 1-based ordinal is divisible by target_period (ties toward the
// lower ordinal). Total count is preserved. If no bin ordinal in 1..n is
// divisible by target_period the histogram is returned unchanged.
Histogram apply_heaping(const Histogram& h, double fraction, int target_period,
                        RngSeed seed);

} // namespace tvor
