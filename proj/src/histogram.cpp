#include "tvor/histogram.hpp"

#include <cstdlib>

namespace tvor {

std::int64_t dtv(const Histogram& h) {
    if (h.counts.empty())
        throw ValidationError("dtv: histogram has no bins");
    std::int64_t v = 0;
    for (std::size_t i = 1; i < h.counts.size(); ++i)
        v += std::llabs(h.counts[i] - h.counts[i - 1]);
    return v;
}

std::int64_t circular_dtv(const Histogram& h) {
    if (h.counts.size() < 2)
        throw ValidationError("circular_dtv: need at least 2 bins, got " +
                              std::to_string(h.counts.size()));
    return dtv(h) + std::llabs(h.counts.front() - h.counts.back());
}

} // namespace tvor
