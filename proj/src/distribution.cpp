#include "tvor/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

namespace tvor {

const char* to_string(DistKind kind) {
    switch (kind) {
    case DistKind::Uniform: return "uniform";
    case DistKind::Triangular: return "triangular";
    case DistKind::Square: return "square";
    case DistKind::SquareRoot: return "square-root";
    case DistKind::Geometric: return "geometric";
    case DistKind::Poisson: return "poisson";
    case DistKind::Binomial: return "binomial";
    case DistKind::Normal: return "normal";
    case DistKind::Beta: return "beta";
    case DistKind::Explicit: return "explicit";
    }
    return "?";
}

DistKind dist_kind_from_string(std::string_view name) {
    if (name == "uniform") return DistKind::Uniform;
    if (name == "triangular") return DistKind::Triangular;
    if (name == "square") return DistKind::Square;
    if (name == "square-root" || name == "sqrt") return DistKind::SquareRoot;
    if (name == "geometric") return DistKind::Geometric;
    if (name == "poisson") return DistKind::Poisson;
    if (name == "binomial") return DistKind::Binomial;
    if (name == "normal") return DistKind::Normal;
    if (name == "beta") return DistKind::Beta;
    if (name == "explicit") return DistKind::Explicit;
    throw ValidationError("unknown distribution kind '" + std::string(name) + "'");
}

DistributionSpec DistributionSpec::uniform(int n, double lo, double hi) {
    DistributionSpec s;
    s.kind = DistKind::Uniform;
    s.binning = {n, lo, hi, true};
    return s;
}

DistributionSpec DistributionSpec::triangular(int n, double a, double b, double c) {
    DistributionSpec s;
    s.kind = DistKind::Triangular;
    s.binning = {n, a, b, true};
    s.tri_a = a;
    s.tri_b = b;
    s.tri_c = c;
    return s;
}

DistributionSpec DistributionSpec::square(int n) {
    DistributionSpec s;
    s.kind = DistKind::Square;
    s.binning.n = n;
    return s;
}

DistributionSpec DistributionSpec::square_root(int n) {
    DistributionSpec s;
    s.kind = DistKind::SquareRoot;
    s.binning.n = n;
    return s;
}

DistributionSpec DistributionSpec::geometric(double p, int n) {
    DistributionSpec s;
    s.kind = DistKind::Geometric;
    s.geom_p = p;
    s.binning.n = n;
    return s;
}

DistributionSpec DistributionSpec::poisson(double lambda, int n) {
    DistributionSpec s;
    s.kind = DistKind::Poisson;
    s.lambda = lambda;
    s.binning.n = n;
    return s;
}

DistributionSpec DistributionSpec::binomial(int trials, double p, int n) {
    DistributionSpec s;
    s.kind = DistKind::Binomial;
    s.binom_trials = trials;
    s.binom_p = p;
    s.binning.n = n;
    return s;
}

DistributionSpec DistributionSpec::normal(double sigma, double c, int n) {
    DistributionSpec s;
    s.kind = DistKind::Normal;
    s.sigma = sigma;
    s.binning = {n, -c, c, true};
    return s;
}

DistributionSpec DistributionSpec::beta_dist(double alpha, double beta, int n,
                                             double lo, double hi) {
    DistributionSpec s;
    s.kind = DistKind::Beta;
    s.alpha = alpha;
    s.beta = beta;
    s.binning = {n, lo, hi, true};
    return s;
}

DistributionSpec DistributionSpec::explicit_probs(std::vector<double> p) {
    DistributionSpec s;
    s.kind = DistKind::Explicit;
    s.probs = std::move(p);
    s.binning.n = static_cast<int>(s.probs.size());
    return s;
}

namespace {

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

double triangular_cdf(double x, double a, double b, double c) {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    if (x < c) return (x - a) * (x - a) / ((b - a) * (c - a));
    if (x > c) return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
    return (c - a) / (b - a);
}

// Continuous kinds: p_i from CDF differences across equal-width bin edges.
// Clamping folds the out-of-range mass into the edge bins; discarding
// renormalizes over the in-range mass instead.
template <typename Cdf>
std::vector<double> bin_continuous(const Binning& bng, Cdf&& cdf) {
    const int n = bng.n;
    std::vector<double> p(static_cast<std::size_t>(n));
    double prev = cdf(bng.lo);
    const double total = cdf(bng.hi) - prev;
    for (int i = 0; i < n; ++i) {
        const double edge =
            (i + 1 == n) ? bng.hi : bng.lo + (bng.hi - bng.lo) * (i + 1) / n;
        const double cur = cdf(edge);
        p[static_cast<std::size_t>(i)] = cur - prev;
        prev = cur;
    }
    if (bng.clamp) {
        p.front() += cdf(bng.lo);
        p.back() += 1.0 - cdf(bng.hi);
    } else {
        if (total <= 0.0)
            throw ValidationError("binning interval carries no probability mass");
        for (double& v : p) v /= total;
    }
    for (double& v : p) v = std::max(v, 0.0);
    return p;
}

double poisson_pmf(long long k, double lambda) {
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(double(k) + 1.0));
}

double binomial_pmf(long long k, long long t, double q) {
    if (q <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (q >= 1.0) return k == t ? 1.0 : 0.0;
    double lg = std::lgamma(double(t) + 1) - std::lgamma(double(k) + 1) -
                std::lgamma(double(t - k) + 1) + k * std::log(q) +
                (t - k) * std::log1p(-q);
    return std::exp(lg);
}

} // namespace

void DistributionSpec::validate() const {
    auto need_bins = [&](int min_n) {
        if (binning.n < min_n)
            throw ValidationError(std::string(to_string(kind)) +
                                  " spec requires at least " + std::to_string(min_n) +
                                  " bins, got " + std::to_string(binning.n));
    };
    switch (kind) {
    case DistKind::Uniform:
    case DistKind::Square:
    case DistKind::SquareRoot:
        need_bins(1);
        break;
    case DistKind::Triangular:
        need_bins(1);
        if (!(tri_a < tri_b) || tri_c < tri_a || tri_c > tri_b)
            throw ValidationError("triangular spec requires a < b and a <= c <= b");
        break;
    case DistKind::Normal:
        need_bins(1);
        if (!(sigma > 0.0))
            throw ValidationError("normal spec requires sigma > 0");
        break;
    case DistKind::Beta:
        need_bins(1);
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw ValidationError("beta spec requires alpha > 0 and beta > 0");
        if (binning.lo < 0.0 || binning.hi > 1.0 || !(binning.lo < binning.hi))
            throw ValidationError("beta spec binning must lie inside [0, 1]");
        break;
    case DistKind::Geometric:
        if (!(geom_p > 0.0) || !(geom_p < 1.0))
            throw ValidationError("geometric spec requires 0 < p < 1");
        break;
    case DistKind::Poisson:
        if (!(lambda > 0.0))
            throw ValidationError("poisson spec requires lambda > 0");
        break;
    case DistKind::Binomial:
        if (binom_trials < 0)
            throw ValidationError("binomial spec requires trials >= 0");
        if (binom_p < 0.0 || binom_p > 1.0)
            throw ValidationError("binomial spec requires 0 <= p <= 1");
        break;
    case DistKind::Explicit: {
        if (probs.empty())
            throw ValidationError("explicit spec requires a probability vector");
        double sum = 0.0;
        for (double v : probs) {
            if (v < 0.0)
                throw ValidationError("explicit spec has a negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ValidationError("explicit spec probabilities sum to " +
                                  std::to_string(sum) + ", expected 1");
        break;
    }
    }
    if (kind == DistKind::Uniform || kind == DistKind::Triangular ||
        kind == DistKind::Normal || kind == DistKind::Beta) {
        if (!(binning.lo < binning.hi))
            throw ValidationError("binning requires lo < hi");
    }
}

int DistributionSpec::bin_count() const {
    validate();
    switch (kind) {
    case DistKind::Geometric:
        if (binning.n > 0) return binning.n;
        // Smallest n with tail mass (1-p)^(n-1) below 1 - tail_quantile.
        return 1 + std::max(1, static_cast<int>(std::ceil(
                                   std::log1p(-tail_quantile) / std::log1p(-geom_p))));
    case DistKind::Poisson: {
        if (binning.n > 0) return binning.n;
        double cdf = 0.0;
        long long k = 0;
        while (cdf < tail_quantile && k < 1'000'000) {
            cdf += poisson_pmf(k, lambda);
            ++k;
        }
        return static_cast<int>(k) + 1;
    }
    case DistKind::Binomial:
        return binning.n > 0 ? binning.n : binom_trials + 1;
    case DistKind::Explicit:
        return static_cast<int>(probs.size());
    default:
        return binning.n;
    }
}

std::vector<double> DistributionSpec::bin_probabilities() const {
    const int n = bin_count();
    std::vector<double> p;
    switch (kind) {
    case DistKind::Uniform:
        p.assign(static_cast<std::size_t>(n), 1.0 / n);
        break;
    case DistKind::Triangular:
        p = bin_continuous(Binning{n, binning.lo, binning.hi, binning.clamp},
                           [&](double x) { return triangular_cdf(x, tri_a, tri_b, tri_c); });
        break;
    case DistKind::Normal:
        p = bin_continuous(Binning{n, binning.lo, binning.hi, binning.clamp},
                           [&](double x) { return normal_cdf(x, mu, sigma); });
        break;
    case DistKind::Beta:
        p = bin_continuous(Binning{n, binning.lo, binning.hi, binning.clamp},
                           [&](double x) {
                               if (x <= 0.0) return 0.0;
                               if (x >= 1.0) return 1.0;
                               return boost::math::ibeta(alpha, beta, x);
                           });
        break;
    case DistKind::Square: {
        p.resize(static_cast<std::size_t>(n));
        // C = 6 / (n (n+1) (2n+1))
        const double norm = 6.0 / (double(n) * (n + 1.0) * (2.0 * n + 1.0));
        for (int i = 1; i <= n; ++i)
            p[static_cast<std::size_t>(i - 1)] = norm * double(i) * double(i);
        break;
    }
    case DistKind::SquareRoot: {
        p.resize(static_cast<std::size_t>(n));
        double sum = 0.0;
        for (int i = 1; i <= n; ++i) sum += std::sqrt(double(i));
        for (int i = 1; i <= n; ++i)
            p[static_cast<std::size_t>(i - 1)] = std::sqrt(double(i)) / sum;
        break;
    }
    case DistKind::Geometric: {
        p.resize(static_cast<std::size_t>(n));
        double cum = 0.0;
        for (int i = 1; i < n; ++i) {
            p[static_cast<std::size_t>(i - 1)] =
                geom_p * std::pow(1.0 - geom_p, double(i - 1));
            cum += p[static_cast<std::size_t>(i - 1)];
        }
        p.back() = std::max(0.0, 1.0 - cum); // absorbed tail
        break;
    }
    case DistKind::Poisson: {
        p.resize(static_cast<std::size_t>(n));
        double cum = 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            p[static_cast<std::size_t>(k)] = poisson_pmf(k, lambda);
            cum += p[static_cast<std::size_t>(k)];
        }
        p.back() = std::max(0.0, 1.0 - cum);
        break;
    }
    case DistKind::Binomial: {
        p.resize(static_cast<std::size_t>(n));
        double cum = 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            p[static_cast<std::size_t>(k)] =
                k <= binom_trials ? binomial_pmf(k, binom_trials, binom_p) : 0.0;
            cum += p[static_cast<std::size_t>(k)];
        }
        p.back() = std::max(0.0, 1.0 - cum);
        break;
    }
    case DistKind::Explicit:
        p = probs;
        break;
    }
    return p;
}

} // namespace tvor
