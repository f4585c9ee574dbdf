#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tvor/errors.hpp"

namespace tvor {

enum class DistKind {
    Uniform,
    Triangular,
    Square,     // p_i proportional to i^2
    SquareRoot, // p_i proportional to sqrt(i)
    Geometric,
    Poisson,
    Binomial,
    Normal,
    Beta,
    Explicit,
};

const char* to_string(DistKind kind);
DistKind dist_kind_from_string(std::string_view name);

// Equal-width binning over [lo, hi]. Mass outside the interval is clamped
// into the edge bins by default; with clamp=false it is discarded and the
// in-range probabilities are renormalized.
struct Binning {
    int n = 0;
    double lo = 0.0;
    double hi = 1.0;
    bool clamp = true;
};

// A named distribution together with its binning; everything downstream
// (sampling, theoretical DTV, Monte Carlo tables) works off the derived
// bin probabilities p_1..p_n.
//
// Continuous kinds (uniform, triangular, normal, beta) use `binning`.
// Discrete kinds (square, square-root, geometric, poisson, binomial) live on
// bin ordinals directly; `binning.n` sets the bin count, and unbounded
// supports (geometric, poisson) absorb their tail into the last bin. With
// n == 0 the count is derived from `tail_quantile`.
struct DistributionSpec {
    DistKind kind = DistKind::Uniform;
    Binning binning;

    double sigma = 1.0; // normal
    double mu = 0.0;    // normal
    double alpha = 2.0; // beta
    double beta = 3.0;  // beta
    double tri_a = 0.0; // triangular
    double tri_b = 1.0;
    double tri_c = 0.5;
    double geom_p = 0.5;       // geometric
    double lambda = 4.0;       // poisson
    int binom_trials = 10;     // binomial
    double binom_p = 0.5;
    std::vector<double> probs; // explicit

    double tail_quantile = 1.0 - 1e-12;

    static DistributionSpec uniform(int n, double lo = 0.0, double hi = 1.0);
    static DistributionSpec triangular(int n, double a = 0.0, double b = 1.0,
                                       double c = 0.5);
    static DistributionSpec square(int n);
    static DistributionSpec square_root(int n);
    static DistributionSpec geometric(double p, int n = 0);
    static DistributionSpec poisson(double lambda, int n = 0);
    static DistributionSpec binomial(int trials, double p, int n = 0);
    // Bins over [-c, c]; out-of-range draws clamp to the nearer endpoint.
    static DistributionSpec normal(double sigma, double c, int n);
    static DistributionSpec beta_dist(double alpha, double beta, int n,
                                      double lo = 0.0, double hi = 1.0);
    static DistributionSpec explicit_probs(std::vector<double> p);

    void validate() const;

    // Derived p_i >= 0 summing to 1 (within 1e-12). Throws ValidationError on
    // invalid parameters.
    std::vector<double> bin_probabilities() const;

    // Number of bins the spec will produce (derives tail truncation if
    // needed) without computing the full probability vector.
    int bin_count() const;
};

} // namespace tvor
