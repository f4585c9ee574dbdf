#include "tvor/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace tvor {

namespace {

// Fenwick tree over bin counts, for O(log n) weighted item selection.
class Fenwick {
public:
    explicit Fenwick(const std::vector<std::int64_t>& counts)
        : n_(counts.size()), tree_(counts.size() + 1, 0) {
        for (std::size_t i = 0; i < n_; ++i) add(i, counts[i]);
    }

    void add(std::size_t i, std::int64_t delta) {
        for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1))
            tree_[j] += delta;
    }

    // Smallest index i with prefix_sum(i) > target.
    std::size_t find(std::int64_t target) const {
        std::size_t pos = 0;
        std::size_t mask = std::bit_floor(n_);
        for (; mask != 0; mask >>= 1) {
            std::size_t next = pos + mask;
            if (next <= n_ && tree_[next] <= target) {
                target -= tree_[next];
                pos = next;
            }
        }
        return pos; // 0-based bin index
    }

private:
    std::size_t n_;
    std::vector<std::int64_t> tree_;
};

// Floyd's algorithm: m distinct positions uniformly from [0, total).
std::unordered_set<std::uint64_t> distinct_positions(std::uint64_t total,
                                                     std::uint64_t m,
                                                     SplitMix64& rng) {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(m) * 2);
    for (std::uint64_t j = total - m; j < total; ++j) {
        std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return chosen;
}

std::vector<std::int64_t> counts_at_positions(
    const std::vector<std::int64_t>& counts,
    const std::unordered_set<std::uint64_t>& positions) {
    std::vector<std::int64_t> cum(counts.size());
    std::int64_t run = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        run += counts[i];
        cum[i] = run;
    }
    std::vector<std::int64_t> out(counts.size(), 0);
    for (std::uint64_t pos : positions) {
        auto it = std::upper_bound(cum.begin(), cum.end(),
                                   static_cast<std::int64_t>(pos));
        ++out[static_cast<std::size_t>(it - cum.begin())];
    }
    return out;
}

} // namespace

Histogram sample(const DistributionSpec& spec, std::int64_t size, RngSeed seed) {
    if (size < 0)
        throw ValidationError("sample: size must be non-negative");
    const std::vector<double> p = spec.bin_probabilities();
    std::vector<double> cdf(p.size());
    double run = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        run += p[i];
        cdf[i] = run;
    }
    cdf.back() = 1.0;

    Histogram h;
    h.counts.assign(p.size(), 0);
    SplitMix64 rng(seed);
    for (std::int64_t k = 0; k < size; ++k) {
        double u = rng.uniform01();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        ++h.counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    return h;
}

Histogram subsample(const Histogram& h, std::int64_t size, RngSeed seed) {
    h.validate();
    const std::int64_t total = h.total();
    if (size < 0 || size > total)
        throw ValidationError("subsample: size " + std::to_string(size) +
                              " outside [0, " + std::to_string(total) + "]");
    Histogram out;
    out.label = h.label;
    out.counts.assign(h.counts.size(), 0);
    if (size == 0) return out;
    if (size == total) {
        out.counts = h.counts;
        return out;
    }

    SplitMix64 rng(seed);
    const std::int64_t keep = size;
    const std::int64_t drop = total - size;
    const std::int64_t small = std::min(keep, drop);

    // Small subsets: pick distinct item positions directly. Otherwise scan
    // items with the exact sequential inclusion probability need/remaining.
    if (small * 16 < total) {
        auto positions = distinct_positions(static_cast<std::uint64_t>(total),
                                            static_cast<std::uint64_t>(small), rng);
        auto picked = counts_at_positions(h.counts, positions);
        if (small == keep) {
            out.counts = picked;
        } else {
            for (std::size_t i = 0; i < h.counts.size(); ++i)
                out.counts[i] = h.counts[i] - picked[i];
        }
        return out;
    }

    std::int64_t need = keep;
    std::int64_t remain = total;
    for (std::size_t i = 0; i < h.counts.size() && need > 0; ++i) {
        for (std::int64_t t = 0; t < h.counts[i]; ++t) {
            if (static_cast<std::int64_t>(rng.below(
                    static_cast<std::uint64_t>(remain))) < need) {
                ++out.counts[i];
                if (--need == 0) break;
            }
            --remain;
        }
    }
    return out;
}

Histogram apply_heaping(const Histogram& h, double fraction, int target_period,
                        RngSeed seed) {
    h.validate();
    if (fraction < 0.0 || fraction > 1.0)
        throw ValidationError("apply_heaping: fraction must lie in [0, 1]");
    if (target_period < 1)
        throw ValidationError("apply_heaping: target_period must be >= 1");

    Histogram out = h;
    const std::int64_t total = h.total();
    const auto n = static_cast<int>(h.counts.size());
    if (total == 0 || n < target_period) return out;

    // Nearest 1-based ordinal divisible by the period, ties toward lower.
    std::vector<int> target(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        int low = (j / target_period) * target_period;
        int high = low + target_period;
        int t;
        if (low < target_period) t = high;
        else if (high > n) t = low;
        else t = (j - low <= high - j) ? low : high;
        target[static_cast<std::size_t>(j - 1)] = t - 1;
    }

    const auto moves = static_cast<std::int64_t>(std::floor(fraction * double(total)));
    SplitMix64 rng(seed);
    Fenwick tree(out.counts);
    for (std::int64_t m = 0; m < moves; ++m) {
        auto item = static_cast<std::int64_t>(
            rng.below(static_cast<std::uint64_t>(total)));
        std::size_t src = tree.find(item);
        std::size_t dst = static_cast<std::size_t>(target[src]);
        if (src == dst) continue; // item already sits on a target bin
        --out.counts[src];
        ++out.counts[dst];
        tree.add(src, -1);
        tree.add(dst, +1);
    }
    return out;
}

} // namespace tvor
