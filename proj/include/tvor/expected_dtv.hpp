#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tvor/distribution.hpp"
#include "tvor/errors.hpp"

namespace tvor {

enum class ExpectedMethod {
    ClosedForm2,  // F(2, N) closed form
    ExactTheorem2,
    Asymptotic,
    Oracle,
    MonteCarlo,
};

struct ExpectedDtv {
    int n = 0;
    std::int64_t size = 0;
    double value = 0.0;
    ExpectedMethod method = ExpectedMethod::ExactTheorem2;
};

// Expected DTV of a 2-bin histogram of N uniform draws:
// 2^(1-N) * floor((N+1)/2) * C(N, floor(N/2)), evaluated in log space.
double f2_exact(std::int64_t size);

// F(2, N) as an exact dyadic rational (odd numerator, power-of-two
// denominator). Limited to N <= 40 so every intermediate fits in 64 bits.
struct F2Rational {
    std::uint64_t numerator = 0; // odd unless zero
    int pow2 = 0;                // value = numerator / 2^pow2
    bool operator==(const F2Rational&) const = default;
};
F2Rational f2_exact_rational(int size);

// Expected DTV of an n-bin histogram of N uniform draws. n == 2 dispatches
// to the closed form; n >= 3 evaluates the double sum over k1 < k2 with
// multinomial weights in log space (all summands positive).
double f_exact(int n, std::int64_t size);

// 2 (n-1) / sqrt(n pi) * sqrt(N)
double f_asymptotic(int n, std::int64_t size);

// Circular variant: n/(n-1) * F(n, N).
double f_circular(int n, std::int64_t size);

// Brute-force expectation by enumerating every multinomial outcome
// (uniform p_i = 1/n unless probs given). Refuses with NumericalGuardError
// when the outcome count C(N+n-1, n-1) exceeds outcome_limit.
double f_oracle(int n, int size, const std::vector<double>* probs = nullptr,
                double outcome_limit = 1e6);

// Number of distinct n-bin histograms with N items, saturating at 2^63-1.
std::uint64_t multinomial_outcome_count(int n, int size);

// Sum of absolute adjacent differences of the spec's bin probabilities.
double theoretical_dtv(const DistributionSpec& spec);

// The closed-form (approximate) theoretical DTV for the named distributions;
// rejects kinds without one (beta, explicit).
double closed_form_dtv(const DistributionSpec& spec);

// (n-1) sqrt(2N/n), from Jensen's inequality in the uniform case.
double jensen_upper_bound(int n, std::int64_t size);

// theoretical_dtv(spec) * N + 2 sqrt(n-1) sqrt(N)
double nonuniform_upper_bound(const DistributionSpec& spec, std::int64_t size);

struct GridRow {
    int n = 0;
    std::int64_t size = 0;
    double exact = 0.0;
    double asymptotic = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
};
std::vector<GridRow> approximation_error_grid(std::span<const int> ns,
                                              std::span<const std::int64_t> sizes);

// Numeric checks of the two structural hypotheses: F(n,N) tracking
// (n-1) F(2, 2N/n), and monotonicity/concavity of N -> F(n,N) for n >= 3.
struct HypothesisReport {
    struct ApproxRow {
        int n;
        std::int64_t size;
        double exact;
        double split_approx; // (n-1) F(2, round(2N/n))
        double rel_dev;
    };
    struct Violation {
        int n;
        std::int64_t size;
        const char* kind; // "monotonicity" | "concavity"
    };
    std::vector<ApproxRow> approx_rows;
    std::vector<Violation> violations;
    std::int64_t monotonic_checks = 0;
    std::int64_t concavity_checks = 0;
};
HypothesisReport hypothesis_checks(std::span<const int> ns, std::int64_t size_lo,
                                   std::int64_t size_hi);

} // namespace tvor
