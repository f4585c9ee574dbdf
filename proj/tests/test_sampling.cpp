#include "doctest.h"

#include "tvor/sampling.hpp"

#include <cmath>
#include <map>

using namespace tvor;

TEST_CASE("sample size zero gives the all-zero histogram") {
    Histogram h = sample(DistributionSpec::uniform(6), 0, RngSeed{1, 0});
    CHECK(h.bins() == 6);
    CHECK(h.total() == 0);
}

TEST_CASE("identical seeds reproduce identical draws") {
    const auto spec = DistributionSpec::beta_dist(2, 3, 20);
    Histogram a = sample(spec, 5000, RngSeed{77, 3});
    Histogram b = sample(spec, 5000, RngSeed{77, 3});
    Histogram c = sample(spec, 5000, RngSeed{77, 4});
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);
}

TEST_CASE("uniform sampling concentrates at N/n") {
    const std::int64_t size = 1'000'000;
    Histogram h = sample(DistributionSpec::uniform(4), size, RngSeed{5, 0});
    CHECK(h.total() == size);
    const double sigma = std::sqrt(double(size) * 0.25 * 0.75);
    for (auto c : h.counts)
        CHECK(std::abs(double(c) - 250000.0) <= 5.0 * sigma);
}

TEST_CASE("normal sampling matches CDF-difference probabilities") {
    const double c = 5.0;
    const int n = 10;
    const std::int64_t size = 100'000;
    Histogram h = sample(DistributionSpec::normal(1.0, c, n), size, RngSeed{9, 1});
    auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    for (int i = 0; i < n; ++i) {
        const double lo = -c + 2.0 * c * i / n;
        const double hi = -c + 2.0 * c * (i + 1) / n;
        double p = phi(hi) - phi(lo);
        if (i == 0) p += phi(-c);
        if (i == n - 1) p += 1.0 - phi(c);
        const double freq = double(h.counts[static_cast<std::size_t>(i)]) / double(size);
        CHECK(std::abs(freq - p) <= 5.0 * std::sqrt(p * (1.0 - p) / double(size)));
    }
}

TEST_CASE("subsample full size returns the histogram, zero returns nothing") {
    Histogram h{{4, 0, 7, 2}, "x"};
    CHECK(subsample(h, h.total(), RngSeed{3, 0}).counts == h.counts);
    CHECK(subsample(h, 0, RngSeed{3, 0}).total() == 0);
    CHECK_THROWS_AS(subsample(h, h.total() + 1, RngSeed{3, 0}), ValidationError);
}

TEST_CASE("subsample frequencies follow the hypergeometric law") {
    // [2,2] choose 2: P([2,0]) = 1/6, P([1,1]) = 4/6, P([0,2]) = 1/6
    Histogram h{{2, 2}, ""};
    const int trials = 100'000;
    std::map<std::vector<std::int64_t>, int> freq;
    for (int t = 0; t < trials; ++t)
        ++freq[subsample(h, 2, RngSeed{41, static_cast<std::uint64_t>(t)}).counts];
    auto check = [&](std::vector<std::int64_t> outcome, double p) {
        const double observed = double(freq[outcome]) / trials;
        CHECK(std::abs(observed - p) <= 3.0 * std::sqrt(p * (1.0 - p) / trials));
    };
    check({2, 0}, 1.0 / 6.0);
    check({1, 1}, 4.0 / 6.0);
    check({0, 2}, 1.0 / 6.0);
}

TEST_CASE("two-stage subsampling matches direct subsampling in distribution") {
    Histogram h{{2, 1, 1}, ""};
    const int trials = 60'000;
    std::map<std::vector<std::int64_t>, double> direct, staged;
    for (int t = 0; t < trials; ++t) {
        const auto tt = static_cast<std::uint64_t>(t);
        direct[subsample(h, 2, RngSeed{7, tt}).counts] += 1.0 / trials;
        Histogram mid = subsample(h, 3, RngSeed{8, tt});
        staged[subsample(mid, 2, RngSeed{9, tt}).counts] += 1.0 / trials;
    }
    for (const auto& [outcome, p] : direct) {
        const double q = staged[outcome];
        CHECK(std::abs(p - q) <= 4.0 * std::sqrt(p * (1.0 - p) * 2.0 / trials));
    }
}

TEST_CASE("large subsamples use both picking strategies consistently") {
    // Means under both the Floyd path (small k) and the scan path (large k)
    // must match the proportional expectation.
    Histogram h;
    h.counts.assign(10, 10'000);
    const std::int64_t total = h.total();
    for (std::int64_t k : {std::int64_t{500}, total / 2, total - 500}) {
        double mean0 = 0.0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t)
            mean0 += double(
                subsample(h, k, RngSeed{100, static_cast<std::uint64_t>(t)}).counts[0]);
        mean0 /= trials;
        const double expect = double(k) / 10.0;
        const double sd = std::sqrt(double(k) * 0.1 * 0.9 *
                                    double(total - k) / double(total - 1));
        CHECK(std::abs(mean0 - expect) <= 5.0 * sd / std::sqrt(double(trials)) + 1e-9);
    }
}

TEST_CASE("heaping preserves totals and never drains target bins") {
    SplitMix64 rng(RngSeed{55, 0});
    for (int rep = 0; rep < 200; ++rep) {
        Histogram h;
        h.counts.resize(1 + rng.below(40));
        for (auto& c : h.counts) c = static_cast<std::int64_t>(rng.below(20));
        const double fraction = double(rng.below(101)) / 100.0;
        const int period = 1 + static_cast<int>(rng.below(7));
        Histogram out = apply_heaping(h, fraction, period, RngSeed{56, static_cast<std::uint64_t>(rep)});
        CHECK(out.total() == h.total());
        for (std::size_t j = period - 1; j < h.counts.size();
             j += static_cast<std::size_t>(period))
            CHECK(out.counts[j] >= h.counts[j]);
    }
}

TEST_CASE("heaping edge cases") {
    Histogram h{{3, 1, 4, 1, 5, 9, 2, 6}, ""};
    // fraction 0: identity
    CHECK(apply_heaping(h, 0.0, 5, RngSeed{1, 0}).counts == h.counts);
    // all mass already on multiples of 5: every move is a no-op
    Histogram heaped{{0, 0, 0, 0, 11, 0, 0, 0, 0, 7}, ""};
    CHECK(apply_heaping(heaped, 1.0, 5, RngSeed{1, 0}).counts == heaped.counts);
    // no bin ordinal divisible by the period: unchanged
    Histogram narrow{{5, 5, 5}, ""};
    CHECK(apply_heaping(narrow, 1.0, 5, RngSeed{1, 0}).counts == narrow.counts);
    // empty histogram: unchanged
    Histogram empty{{0, 0, 0, 0, 0}, ""};
    CHECK(apply_heaping(empty, 1.0, 2, RngSeed{1, 0}).total() == 0);
}

TEST_CASE("heaping moves items to the nearest target with ties toward lower") {
    // single item in bin 8 of 10 (1-based), period 5: targets are 5 and 10,
    // distances 3 and 2, so it must land on bin 10.
    Histogram h{{0, 0, 0, 0, 0, 0, 0, 1, 0, 0}, ""};
    Histogram out = apply_heaping(h, 1.0, 5, RngSeed{2, 0});
    CHECK(out.counts[9] == 1);
    CHECK(out.total() == 1);
    // bin 3 of 10: targets 5 at distance 2; bin 1..2 -> 5 as well
    Histogram h2{{0, 0, 1, 0, 0, 0, 0, 0, 0, 0}, ""};
    CHECK(apply_heaping(h2, 1.0, 5, RngSeed{2, 0}).counts[4] == 1);
    // equidistant: bin 3 of 4 with period 2 sits between ordinals 2 and 4
    Histogram h3{{0, 0, 1, 0}, ""};
    CHECK(apply_heaping(h3, 1.0, 2, RngSeed{2, 0}).counts[1] == 1);
}
