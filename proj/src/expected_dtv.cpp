#include "tvor/expected_dtv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace tvor {

namespace {

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

std::vector<double> log_factorials(std::int64_t up_to) {
    std::vector<double> lg(static_cast<std::size_t>(up_to) + 1);
    for (std::int64_t k = 0; k <= up_to; ++k)
        lg[static_cast<std::size_t>(k)] = std::lgamma(double(k) + 1.0);
    return lg;
}

// Lexicographically descending enumeration of compositions of N into n parts.
// Returns false once exhausted.
bool next_composition(std::vector<int>& k) {
    const std::size_t n = k.size();
    std::size_t i = n - 1;
    while (i-- > 0)
        if (k[i] > 0) {
            int t = k[n - 1];
            k[n - 1] = 0;
            --k[i];
            k[i + 1] = t + 1;
            return true;
        }
    return false;
}

std::int64_t dtv_of(const std::vector<int>& k) {
    std::int64_t v = 0;
    for (std::size_t i = 1; i < k.size(); ++i)
        v += std::abs(k[i] - k[i - 1]);
    return v;
}

} // namespace

double f2_exact(std::int64_t size) {
    if (size < 0)
        throw ValidationError("f2_exact: N must be non-negative");
    if (size == 0) return 0.0;
    const std::int64_t m = size / 2;
    const double ln = std::log(double((size + 1) / 2)) +
                      std::lgamma(double(size) + 1.0) -
                      std::lgamma(double(m) + 1.0) -
                      std::lgamma(double(size - m) + 1.0) -
                      double(size - 1) * std::numbers::ln2;
    return std::exp(ln);
}

F2Rational f2_exact_rational(int size) {
    if (size < 0)
        throw ValidationError("f2_exact_rational: N must be non-negative");
    if (size > 40)
        throw ValidationError("f2_exact_rational: exact-integer mode limited to N <= 40");
    if (size == 0) return {0, 0};
    // Pascal's triangle row; C(40, 20) ~ 1.4e11 so 64 bits suffice.
    std::vector<std::uint64_t> row{1};
    for (int r = 1; r <= size; ++r) {
        std::vector<std::uint64_t> next(static_cast<std::size_t>(r) + 1, 1);
        for (int j = 1; j < r; ++j)
            next[static_cast<std::size_t>(j)] =
                row[static_cast<std::size_t>(j - 1)] + row[static_cast<std::size_t>(j)];
        row = std::move(next);
    }
    F2Rational out;
    out.numerator = static_cast<std::uint64_t>((size + 1) / 2) *
                    row[static_cast<std::size_t>(size / 2)];
    out.pow2 = size - 1;
    while (out.pow2 > 0 && out.numerator % 2 == 0) {
        out.numerator /= 2;
        --out.pow2;
    }
    return out;
}

double f_exact(int n, std::int64_t size) {
    if (n < 2)
        throw ValidationError("f_exact: n must be >= 2, got " + std::to_string(n));
    if (size < 0)
        throw ValidationError("f_exact: N must be non-negative");
    if (n == 2) return f2_exact(size); // the (n-2) factors degenerate
    if (size == 0) return 0.0;

    const auto N = size;
    const std::vector<double> lg = log_factorials(N);
    std::vector<double> log_int(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::int64_t k = 1; k <= N; ++k)
        log_int[static_cast<std::size_t>(k)] = std::log(double(k));

    const double ln_n2 = std::log(double(n - 2));
    const double base = std::log(2.0 * (n - 1)) + lg[static_cast<std::size_t>(N)] -
                        double(N) * std::log(double(n));
    KahanSum acc;
    for (std::int64_t k1 = 0; 2 * k1 + 1 <= N; ++k1) {
        for (std::int64_t k2 = k1 + 1; k1 + k2 <= N; ++k2) {
            const std::int64_t rest = N - k1 - k2;
            const double lt = base + log_int[static_cast<std::size_t>(k2 - k1)] -
                              lg[static_cast<std::size_t>(k1)] -
                              lg[static_cast<std::size_t>(k2)] -
                              lg[static_cast<std::size_t>(rest)] +
                              double(rest) * ln_n2;
            acc.add(std::exp(lt));
        }
    }
    return acc.sum;
}

double f_asymptotic(int n, std::int64_t size) {
    if (n < 2)
        throw ValidationError("f_asymptotic: n must be >= 2");
    if (size < 1)
        throw ValidationError("f_asymptotic: N must be >= 1");
    return 2.0 * (n - 1) / std::sqrt(double(n) * std::numbers::pi) *
           std::sqrt(double(size));
}

double f_circular(int n, std::int64_t size) {
    if (n < 2)
        throw ValidationError("f_circular: n must be >= 2");
    return double(n) / double(n - 1) * f_exact(n, size);
}

std::uint64_t multinomial_outcome_count(int n, int size) {
    // C(N + n - 1, n - 1) with saturation.
    const std::uint64_t cap = std::numeric_limits<std::int64_t>::max();
    std::uint64_t out = 1;
    for (int i = 1; i < n; ++i) {
        __uint128_t t = static_cast<__uint128_t>(out) *
                        static_cast<std::uint64_t>(size + i);
        t /= static_cast<std::uint64_t>(i);
        if (t > cap) return cap;
        out = static_cast<std::uint64_t>(t);
    }
    return out;
}

double f_oracle(int n, int size, const std::vector<double>* probs,
                double outcome_limit) {
    if (n < 2)
        throw ValidationError("f_oracle: n must be >= 2");
    if (size < 0)
        throw ValidationError("f_oracle: N must be non-negative");
    if (probs) {
        if (static_cast<int>(probs->size()) != n)
            throw ValidationError("f_oracle: probs length does not match n");
        double sum = 0.0;
        for (double v : *probs) {
            if (v < 0.0) throw ValidationError("f_oracle: negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("f_oracle: probabilities must sum to 1");
    }
    const std::uint64_t outcomes = multinomial_outcome_count(n, size);
    if (double(outcomes) > outcome_limit)
        throw NumericalGuardError(
            "f_oracle: refusing to enumerate " + std::to_string(outcomes) +
            " outcomes (limit " + std::to_string(std::int64_t(outcome_limit)) + ")");
    if (size == 0) return 0.0;

    std::vector<int> k(static_cast<std::size_t>(n), 0);
    k[0] = size;

    // Uniform weights with small N: exact integer accumulation of
    // sum C(N; k) * dtv(k), divided by n^N once at the end.
    if (!probs && size <= 20) {
        std::vector<long double> fact(static_cast<std::size_t>(size) + 1, 1.0L);
        for (int i = 1; i <= size; ++i)
            fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;
        long double weighted = 0.0L;
        do {
            long double coeff = fact[static_cast<std::size_t>(size)];
            for (int part : k) coeff /= fact[static_cast<std::size_t>(part)];
            weighted += coeff * static_cast<long double>(dtv_of(k));
        } while (next_composition(k));
        return static_cast<double>(weighted /
                                   powl(static_cast<long double>(n), size));
    }

    const std::vector<double> lg = log_factorials(size);
    std::vector<double> log_p;
    if (probs) {
        log_p.resize(probs->size());
        for (std::size_t i = 0; i < probs->size(); ++i)
            log_p[i] = (*probs)[i] > 0.0 ? std::log((*probs)[i])
                                         : -std::numeric_limits<double>::infinity();
    }
    const double uniform_lp = -std::log(double(n));
    KahanSum acc;
    do {
        const std::int64_t v = dtv_of(k);
        if (v == 0) continue;
        double lt = lg[static_cast<std::size_t>(size)];
        bool impossible = false;
        for (int i = 0; i < n; ++i) {
            const int part = k[static_cast<std::size_t>(i)];
            lt -= lg[static_cast<std::size_t>(part)];
            if (probs) {
                if (part > 0 && log_p[static_cast<std::size_t>(i)] ==
                                    -std::numeric_limits<double>::infinity()) {
                    impossible = true;
                    break;
                }
                if (part > 0) lt += part * log_p[static_cast<std::size_t>(i)];
            } else {
                lt += part * uniform_lp;
            }
        }
        if (!impossible) acc.add(std::exp(lt) * double(v));
    } while (next_composition(k));
    return acc.sum;
}

double theoretical_dtv(const DistributionSpec& spec) {
    const std::vector<double> p = spec.bin_probabilities();
    if (p.size() < 2)
        throw ValidationError("theoretical_dtv: spec must yield at least 2 bins");
    double v = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) v += std::abs(p[i] - p[i - 1]);
    return v;
}

double closed_form_dtv(const DistributionSpec& spec) {
    spec.validate();
    const int n = spec.bin_count();
    switch (spec.kind) {
    case DistKind::Uniform:
        return 0.0;
    case DistKind::Triangular:
        return n % 2 == 0 ? (4.0 * n - 8.0) / (double(n) * n)
                          : (4.0 * n - 6.0) / (double(n) * n);
    case DistKind::Square:
        return 3.0 / n;
    case DistKind::SquareRoot:
        return 1.5 / n;
    case DistKind::Geometric:
        return spec.geom_p;
    case DistKind::Poisson: {
        if (spec.lambda <= 1.0)
            throw ValidationError("closed_form_dtv: poisson form requires lambda > 1");
        const double fl = std::floor(spec.lambda);
        return 2.0 * std::exp(fl * std::log(spec.lambda) - spec.lambda -
                              std::lgamma(fl + 1.0));
    }
    case DistKind::Binomial:
        return std::sqrt(8.0 / (std::numbers::pi * spec.binom_trials));
    case DistKind::Normal: {
        const double c = (spec.binning.hi - spec.binning.lo) / 2.0;
        return 2.0 * c / (n * spec.sigma) * std::sqrt(2.0 / std::numbers::pi);
    }
    default:
        throw ValidationError(std::string("closed_form_dtv: no closed form for kind '") +
                              to_string(spec.kind) + "'");
    }
}

double jensen_upper_bound(int n, std::int64_t size) {
    if (n < 2)
        throw ValidationError("jensen_upper_bound: n must be >= 2");
    if (size < 0)
        throw ValidationError("jensen_upper_bound: N must be non-negative");
    return double(n - 1) * std::sqrt(2.0 * double(size) / double(n));
}

double nonuniform_upper_bound(const DistributionSpec& spec, std::int64_t size) {
    if (size < 0)
        throw ValidationError("nonuniform_upper_bound: N must be non-negative");
    const std::vector<double> p = spec.bin_probabilities();
    double tv = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) tv += std::abs(p[i] - p[i - 1]);
    return tv * double(size) +
           2.0 * std::sqrt(double(p.size()) - 1.0) * std::sqrt(double(size));
}

std::vector<GridRow> approximation_error_grid(std::span<const int> ns,
                                              std::span<const std::int64_t> sizes) {
    std::vector<GridRow> rows;
    rows.reserve(ns.size() * sizes.size());
    for (int n : ns)
        for (std::int64_t N : sizes) {
            GridRow r;
            r.n = n;
            r.size = N;
            r.exact = f_exact(n, N);
            r.asymptotic = f_asymptotic(n, N);
            r.abs_err = std::abs(r.asymptotic - r.exact);
            r.rel_err = r.exact > 0.0 ? r.abs_err / r.exact
                                      : std::numeric_limits<double>::quiet_NaN();
            rows.push_back(r);
        }
    return rows;
}

HypothesisReport hypothesis_checks(std::span<const int> ns, std::int64_t size_lo,
                                   std::int64_t size_hi) {
    if (size_lo < 1 || size_hi < size_lo)
        throw ValidationError("hypothesis_checks: need 1 <= size_lo <= size_hi");
    HypothesisReport rep;
    for (int n : ns) {
        std::vector<double> f(static_cast<std::size_t>(size_hi - size_lo) + 1);
        for (std::int64_t N = size_lo; N <= size_hi; ++N) {
            f[static_cast<std::size_t>(N - size_lo)] = f_exact(n, N);
            const auto half = static_cast<std::int64_t>(
                std::llround(2.0 * double(N) / double(n)));
            if (half >= 1) {
                const double approx = double(n - 1) * f2_exact(half);
                const double exact = f[static_cast<std::size_t>(N - size_lo)];
                rep.approx_rows.push_back(
                    {n, N, exact, approx, std::abs(exact - approx) / exact});
            }
        }
        for (std::int64_t N = size_lo; N + 1 <= size_hi; ++N) {
            const double cur = f[static_cast<std::size_t>(N - size_lo)];
            const double nxt = f[static_cast<std::size_t>(N + 1 - size_lo)];
            ++rep.monotonic_checks;
            // F(2, 2r) == F(2, 2r-1) exactly, so n == 2 is only non-decreasing
            // (up to floating-point noise in the log-gamma evaluation).
            const bool ok = n >= 3 ? nxt > cur : nxt >= cur * (1.0 - 1e-12);
            if (!ok) rep.violations.push_back({n, N, "monotonicity"});
        }
        if (n >= 3) {
            for (std::int64_t N = size_lo + 1; N + 1 <= size_hi; ++N) {
                const double prev = f[static_cast<std::size_t>(N - 1 - size_lo)];
                const double cur = f[static_cast<std::size_t>(N - size_lo)];
                const double nxt = f[static_cast<std::size_t>(N + 1 - size_lo)];
                ++rep.concavity_checks;
                if (!(nxt + prev < 2.0 * cur))
                    rep.violations.push_back({n, N, "concavity"});
            }
        }
    }
    return rep;
}

} // namespace tvor
