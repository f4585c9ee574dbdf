#include "tvor/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tvor/parallel.hpp"
#include "tvor/sampling.hpp"

namespace tvor {

const char* to_string(FitKind kind) {
    return kind == FitKind::LeastSquares ? "least-squares" : "ransac";
}

FitKind fit_kind_from_string(std::string_view name) {
    if (name == "least-squares") return FitKind::LeastSquares;
    if (name == "ransac") return FitKind::Ransac;
    throw ValidationError("unknown fit kind '" + std::string(name) + "'");
}

const char* to_string(ScoreMethod method) {
    switch (method) {
    case ScoreMethod::TvorD1: return "tvor-d1";
    case ScoreMethod::McD2: return "mc-d2";
    case ScoreMethod::Chi2: return "chi2";
    case ScoreMethod::Whipple: return "whipple";
    case ScoreMethod::Myers: return "myers";
    }
    return "?";
}

namespace {

void check_rank(std::span<const FitPoint> points) {
    std::set<double> distinct;
    for (const auto& p : points)
        if (p.size > 0.0) distinct.insert(p.size);
    if (distinct.size() < 2)
        throw RankDeficientError(
            "fit_model: need at least 2 points with distinct positive sizes");
}

double residual_rms(std::span<const FitPoint> points, const DtvModel& m,
                    const std::vector<bool>* mask) {
    double sum = 0.0;
    std::int64_t used = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        if (points[i].size <= 0.0) continue;
        const double r =
            (points[i].dtv - m.predict(points[i].size)) / std::sqrt(points[i].size);
        sum += r * r;
        ++used;
    }
    return used > 0 ? std::sqrt(sum / double(used)) : 0.0;
}

DtvModel ols_fit(std::span<const FitPoint> points, const std::vector<bool>* mask) {
    long double sxx = 0, sxy = 0, syy = 0, rx = 0, ry = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        const long double N = points[i].size;
        const long double r = std::sqrt(static_cast<double>(N));
        const long double v = points[i].dtv;
        sxx += N * N;
        sxy += N * r;
        syy += N; // r * r
        rx += N * v;
        ry += r * v;
    }
    const long double det = sxx * syy - sxy * sxy;
    const long double scale = sxx * syy;
    if (!(scale > 0) || det <= scale * 1e-14L)
        throw RankDeficientError("fit_model: design matrix is rank deficient");
    DtvModel m;
    m.a = static_cast<double>((rx * syy - ry * sxy) / det);
    m.b = static_cast<double>((ry * sxx - rx * sxy) / det);
    return m;
}

} // namespace

DtvModel fit_model(std::span<const FitPoint> points) {
    if (points.size() < 2)
        throw ValidationError("fit_model: need at least 2 points");
    check_rank(points);
    DtvModel m = ols_fit(points, nullptr);
    m.fit_kind = FitKind::LeastSquares;
    m.residual_scale = residual_rms(points, m, nullptr);
    return m;
}

DtvModel fit_model_ransac(std::span<const FitPoint> points,
                          const RansacParams& params, RngSeed seed) {
    if (points.size() < 2)
        throw ValidationError("fit_model_ransac: need at least 2 points");
    if (!(params.threshold > 0.0))
        throw ValidationError("fit_model_ransac: threshold must be positive");
    if (params.iterations < 1)
        throw ValidationError("fit_model_ransac: iterations must be >= 1");
    check_rank(points);

    const std::size_t m = points.size();
    const int min_points =
        params.min_points > 0
            ? params.min_points
            : std::max(10, static_cast<int>(std::ceil(0.2 * double(m))));

    std::vector<bool> best_mask;
    std::size_t best_count = 0;
    SplitMix64 rng(seed);
    for (int iter = 0; iter < params.iterations; ++iter) {
        const auto i = static_cast<std::size_t>(rng.below(m));
        const auto j = static_cast<std::size_t>(rng.below(m));
        const FitPoint& pi = points[i];
        const FitPoint& pj = points[j];
        if (pi.size <= 0.0 || pj.size <= 0.0 || pi.size == pj.size) continue;
        // Exact interpolation through the candidate pair.
        const double ri = std::sqrt(pi.size), rj = std::sqrt(pj.size);
        const double det = pi.size * rj - pj.size * ri;
        if (det == 0.0) continue;
        DtvModel cand;
        cand.a = (pi.dtv * rj - pj.dtv * ri) / det;
        cand.b = (pj.dtv * pi.size - pi.dtv * pj.size) / det;

        std::vector<bool> mask(m, false);
        std::size_t count = 0;
        for (std::size_t t = 0; t < m; ++t) {
            if (points[t].size <= 0.0) continue;
            const double resid = std::abs(points[t].dtv - cand.predict(points[t].size)) /
                                 std::sqrt(points[t].size);
            if (resid <= params.threshold) {
                mask[t] = true;
                ++count;
            }
        }
        if (count > best_count) {
            best_count = count;
            best_mask = std::move(mask);
        }
    }
    if (best_count < static_cast<std::size_t>(min_points))
        throw NumericalGuardError(
            "fit_model_ransac: no consensus set of size >= " +
            std::to_string(min_points) + " (best " + std::to_string(best_count) + ")");

    DtvModel fit = ols_fit(points, &best_mask);
    fit.fit_kind = FitKind::Ransac;
    fit.inlier_mask = std::move(best_mask);
    fit.residual_scale = residual_rms(points, fit, &*fit.inlier_mask);
    return fit;
}

double score_d1(const Histogram& h, const DtvModel& model) {
    const std::int64_t n = h.total();
    if (n < 1)
        throw ValidationError("score_d1: histogram '" + h.label +
                              "' has sample size 0");
    const double size = double(n);
    return std::abs(double(dtv(h)) - model.predict(size)) / std::sqrt(size);
}

void assign_ranks(std::vector<ScoreReport>& reports) {
    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return reports[a].score > reports[b].score;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        reports[order[pos]].rank = static_cast<int>(pos);
}

namespace {

std::vector<FitPoint> fit_points_of(std::span<const Histogram> histograms) {
    std::vector<FitPoint> pts;
    pts.reserve(histograms.size());
    for (const auto& h : histograms)
        pts.push_back({double(h.total()), double(dtv(h))});
    return pts;
}

void check_shared_bins(std::span<const Histogram> histograms) {
    if (histograms.size() < 2)
        throw ValidationError("need at least 2 histograms");
    const std::size_t n = histograms.front().bins();
    for (const auto& h : histograms) {
        h.validate();
        if (h.bins() != n)
            throw ValidationError("histogram '" + h.label + "' has " +
                                  std::to_string(h.bins()) + " bins, expected " +
                                  std::to_string(n));
    }
}

} // namespace

DtvModel fit_tvor_model(std::span<const Histogram> histograms,
                        const TvorOptions& options) {
    check_shared_bins(histograms);
    std::vector<FitPoint> pts = fit_points_of(histograms);
    pts.insert(pts.end(), options.extra_fit_points.begin(),
               options.extra_fit_points.end());
    try {
        return options.use_ransac
                   ? fit_model_ransac(pts, options.ransac, options.seed)
                   : fit_model(pts);
    } catch (const RankDeficientError&) {
        if (!options.degenerate_fallback) throw;
        double size = 0.0, mean = 0.0;
        for (const auto& p : pts) {
            size = std::max(size, p.size);
            mean += p.dtv;
        }
        mean /= double(pts.size());
        if (size <= 0.0) throw;
        return DtvModel{mean / size, 0.0, FitKind::LeastSquares, {}, 0.0};
    }
}

std::vector<ScoreReport> run_tvor(std::span<const Histogram> histograms,
                                  const TvorOptions& options) {
    const DtvModel model = fit_tvor_model(histograms, options);
    std::vector<ScoreReport> reports;
    reports.reserve(histograms.size());
    for (const auto& h : histograms) {
        ScoreReport r;
        r.label = h.label;
        r.size = h.total();
        r.dtv = dtv(h);
        r.predicted = model.predict(double(r.size));
        r.score = score_d1(h, model);
        r.method = ScoreMethod::TvorD1;
        reports.push_back(std::move(r));
    }
    assign_ranks(reports);
    return reports;
}

const McRow* McTable::find(std::int64_t size) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), size,
                               [](const McRow& r, std::int64_t s) { return r.size < s; });
    if (it == rows.end() || it->size != size) return nullptr;
    return &*it;
}

namespace {

McTable build_table(std::span<const std::int64_t> sizes, std::int64_t trials,
                    RngSeed seed, int threads, std::string source,
                    const std::function<Histogram(std::int64_t size, RngSeed)>& draw) {
    if (trials < 2)
        throw ValidationError("build_mc_table: trials must be >= 2");
    if (sizes.empty())
        throw ValidationError("build_mc_table: need at least one size");
    McTable table;
    table.source = std::move(source);
    table.base_seed = seed;
    table.rows.reserve(sizes.size());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::int64_t size = sizes[si];
        std::vector<double> dtvs(static_cast<std::size_t>(trials));
        parallel_for(trials, threads, [&](std::int64_t t) {
            Histogram h = draw(size, derive(seed, si, static_cast<std::uint64_t>(t)));
            dtvs[static_cast<std::size_t>(t)] = double(dtv(h));
        });
        double mean = 0.0;
        for (double v : dtvs) mean += v;
        mean /= double(trials);
        double ss = 0.0;
        for (double v : dtvs) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / double(trials - 1));
        table.rows.push_back({size, mean, sd, trials});
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const McRow& a, const McRow& b) { return a.size < b.size; });
    return table;
}

} // namespace

McTable build_mc_table(const DistributionSpec& spec,
                       std::span<const std::int64_t> sizes, std::int64_t trials,
                       RngSeed seed, int threads) {
    spec.validate();
    for (std::int64_t s : sizes)
        if (s < 0) throw ValidationError("build_mc_table: negative size");
    return build_table(sizes, trials, seed, threads, to_string(spec.kind),
                       [&](std::int64_t size, RngSeed s) { return sample(spec, size, s); });
}

McTable build_mc_table(const Histogram& pool, std::span<const std::int64_t> sizes,
                       std::int64_t trials, RngSeed seed, int threads) {
    pool.validate();
    const std::int64_t total = pool.total();
    for (std::int64_t s : sizes)
        if (s < 0 || s > total)
            throw ValidationError("build_mc_table: size " + std::to_string(s) +
                                  " exceeds pooled total " + std::to_string(total));
    std::string source = pool.label.empty() ? "pool" : "pool:" + pool.label;
    return build_table(sizes, trials, seed, threads, std::move(source),
                       [&](std::int64_t size, RngSeed s) { return subsample(pool, size, s); });
}

namespace {

struct McPoint {
    double mean;
    double stddev;
};

McPoint table_lookup(const McTable& table, std::int64_t size,
                     bool allow_extrapolation) {
    if (table.rows.empty())
        throw ValidationError("score_d2: Monte Carlo table is empty");
    if (const McRow* row = table.find(size)) return {row->mean, row->stddev};
    const McRow& lo = table.rows.front();
    const McRow& hi = table.rows.back();
    if ((size < lo.size || size > hi.size) && !allow_extrapolation)
        throw ValidationError("score_d2: size " + std::to_string(size) +
                              " outside table range [" + std::to_string(lo.size) +
                              ", " + std::to_string(hi.size) +
                              "] and extrapolation is disabled");
    if (table.rows.size() == 1)
        return {lo.mean, lo.stddev};
    // Linear interpolation in sqrt(N); both moments are near-linear there.
    std::size_t upper = 0;
    while (upper < table.rows.size() && table.rows[upper].size < size) ++upper;
    std::size_t i0, i1;
    if (upper == 0) {
        i0 = 0;
        i1 = 1;
    } else if (upper == table.rows.size()) {
        i0 = table.rows.size() - 2;
        i1 = table.rows.size() - 1;
    } else {
        i0 = upper - 1;
        i1 = upper;
    }
    const McRow& r0 = table.rows[i0];
    const McRow& r1 = table.rows[i1];
    const double x = std::sqrt(double(size));
    const double x0 = std::sqrt(double(r0.size));
    const double x1 = std::sqrt(double(r1.size));
    const double t = (x - x0) / (x1 - x0);
    return {r0.mean + t * (r1.mean - r0.mean),
            r0.stddev + t * (r1.stddev - r0.stddev)};
}

} // namespace

double score_d2(const Histogram& h, const McTable& table, bool allow_extrapolation) {
    const McPoint pt = table_lookup(table, h.total(), allow_extrapolation);
    if (!(pt.stddev > 1e-9))
        throw NumericalGuardError(
            "score_d2: Monte Carlo standard deviation below 1e-9 at size " +
            std::to_string(h.total()));
    return std::abs(double(dtv(h)) - pt.mean) / pt.stddev;
}

std::vector<ScoreReport> score_with_mc_table(std::span<const Histogram> histograms,
                                             const McTable& table,
                                             bool allow_extrapolation) {
    std::vector<ScoreReport> reports;
    reports.reserve(histograms.size());
    for (const auto& h : histograms) {
        const McPoint pt = table_lookup(table, h.total(), allow_extrapolation);
        if (!(pt.stddev > 1e-9))
            throw NumericalGuardError(
                "score_d2: Monte Carlo standard deviation below 1e-9 at size " +
                std::to_string(h.total()));
        ScoreReport r;
        r.label = h.label;
        r.size = h.total();
        r.dtv = dtv(h);
        r.predicted = pt.mean;
        r.score = std::abs(double(r.dtv) - pt.mean) / pt.stddev;
        r.method = ScoreMethod::McD2;
        reports.push_back(std::move(r));
    }
    assign_ranks(reports);
    return reports;
}

double fit_stderr_model(const McTable& table) {
    if (table.rows.size() < 2)
        throw ValidationError("fit_stderr_model: need at least 2 table rows");
    long double num = 0, den = 0;
    for (const McRow& r : table.rows) {
        const long double x = std::sqrt(double(r.size));
        num += x * r.stddev;
        den += x * x;
    }
    if (!(den > 0))
        throw ValidationError("fit_stderr_model: degenerate table (all sizes zero)");
    return static_cast<double>(num / den);
}

} // namespace tvor
