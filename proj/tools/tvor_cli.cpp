// tvor: histogram smoothness-outlier toolkit.
//
// Exit codes: 0 success, 2 usage error, 3 input/validation error,
// 4 numerical-guard refusal.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tvor/baseline.hpp"
#include "tvor/experiments.hpp"
#include "tvor/expected_dtv.hpp"
#include "tvor/io.hpp"
#include "tvor/model.hpp"
#include "tvor/parallel.hpp"
#include "tvor/sampling.hpp"
#include "tvor/version.hpp"

namespace fs = std::filesystem;
using namespace tvor;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    int threads = 0; // 0 = auto
    std::string output_dir;
    std::string format = "csv"; // csv | json
};

std::string join_argv(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += ' ';
        out += argv[i];
    }
    return out;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Output sink: files under --output-dir (CSV gets a sibling manifest,
// JSON embeds it) or stdout with the manifest on a leading comment line.
class Sink {
public:
    Sink(const GlobalOptions& global, RunManifest manifest)
        : global_(global), manifest_(std::move(manifest)) {}

    void emit_csv(const std::string& name, const std::string& body) const {
        if (global_.output_dir.empty()) {
            std::cout << "# manifest " << one_line(manifest_to_json(manifest_));
            std::cout << body;
            return;
        }
        const fs::path dir(global_.output_dir);
        fs::create_directories(dir);
        write_file(dir / name, body);
        write_file(dir / (name + ".manifest.json"), manifest_to_json(manifest_));
        std::cerr << "wrote " << (dir / name).string() << "\n";
    }

    void emit_json(const std::string& name, const std::string& body) const {
        if (global_.output_dir.empty()) {
            std::cout << body;
            return;
        }
        const fs::path dir(global_.output_dir);
        fs::create_directories(dir);
        write_file(dir / name, body);
        std::cerr << "wrote " << (dir / name).string() << "\n";
    }

    const RunManifest& manifest() const { return manifest_; }

private:
    static std::string one_line(std::string text) {
        std::string out;
        out.reserve(text.size());
        for (char c : text)
            if (c != '\n') out += c;
        out += '\n';
        return out;
    }
    static void write_file(const fs::path& path, const std::string& body) {
        std::ofstream out(path);
        if (!out)
            throw ValidationError("cannot write '" + path.string() + "'");
        out << body;
    }

    const GlobalOptions& global_;
    RunManifest manifest_;
};

void emit_reports(const GlobalOptions& global, const Sink& sink,
                  const std::string& stem, std::span<const ScoreReport> reports) {
    if (global.format == "json") {
        sink.emit_json(stem + ".json", reports_to_json(reports, sink.manifest()));
    } else {
        std::ostringstream out;
        write_reports_csv(reports, out);
        sink.emit_csv(stem + ".csv", out.str());
    }
}

// Distribution flags shared by the subcommands that accept a spec.
struct SpecFlags {
    std::string kind;
    int bins = 0;
    double lo = 0.0, hi = 1.0;
    bool lo_set = false, hi_set = false;
    double c = 0.0;
    bool c_set = false;
    bool discard = false;
    double sigma = 1.0, mu = 0.0;
    double alpha = 2.0, beta = 3.0;
    double tri_a = 0.0, tri_b = 1.0, tri_c = 0.5;
    double p = 0.5, lambda = 4.0;
    int binom_trials = 10;
    double binom_p = 0.5;
    double quantile = 1.0 - 1e-12;
    std::vector<double> probs;

    void add_to(CLI::App* cmd, bool kind_required = true) {
        auto* k = cmd->add_option("--kind", kind,
                                  "distribution kind (uniform, triangular, square, "
                                  "square-root, geometric, poisson, binomial, "
                                  "normal, beta, explicit)");
        if (kind_required) k->required();
        cmd->add_option("--bins", bins, "number of bins (0 derives it for "
                                        "unbounded discrete supports)");
        cmd->add_option("--lo", lo, "binning interval lower edge")
            ->each([this](const std::string&) { lo_set = true; });
        cmd->add_option("--hi", hi, "binning interval upper edge")
            ->each([this](const std::string&) { hi_set = true; });
        cmd->add_option("--c", c, "symmetric half-width: bins over [-c, c]")
            ->each([this](const std::string&) { c_set = true; });
        cmd->add_flag("--discard", discard,
                      "discard out-of-range draws instead of clamping");
        cmd->add_option("--sigma", sigma, "normal sigma");
        cmd->add_option("--mu", mu, "normal mean");
        cmd->add_option("--alpha", alpha, "beta alpha");
        cmd->add_option("--beta", beta, "beta beta");
        cmd->add_option("--tri-a", tri_a, "triangular lower bound");
        cmd->add_option("--tri-b", tri_b, "triangular upper bound");
        cmd->add_option("--tri-c", tri_c, "triangular mode");
        cmd->add_option("--p", p, "geometric success probability");
        cmd->add_option("--lambda", lambda, "poisson rate");
        cmd->add_option("--binom-trials", binom_trials, "binomial trial count");
        cmd->add_option("--binom-p", binom_p, "binomial success probability");
        cmd->add_option("--quantile", quantile, "tail truncation quantile");
        cmd->add_option("--probs", probs, "explicit bin probabilities")
            ->delimiter(',');
    }

    DistributionSpec build() const {
        DistributionSpec spec;
        spec.kind = dist_kind_from_string(kind);
        spec.binning.n = bins;
        spec.binning.clamp = !discard;
        if (c_set) {
            spec.binning.lo = -c;
            spec.binning.hi = c;
        }
        if (lo_set) spec.binning.lo = lo;
        if (hi_set) spec.binning.hi = hi;
        if (!c_set && !lo_set && !hi_set) {
            if (spec.kind == DistKind::Triangular) {
                spec.binning.lo = tri_a;
                spec.binning.hi = tri_b;
            } else {
                spec.binning.lo = 0.0;
                spec.binning.hi = 1.0;
            }
        }
        spec.sigma = sigma;
        spec.mu = mu;
        spec.alpha = alpha;
        spec.beta = beta;
        spec.tri_a = tri_a;
        spec.tri_b = tri_b;
        spec.tri_c = tri_c;
        spec.geom_p = p;
        spec.lambda = lambda;
        spec.binom_trials = binom_trials;
        spec.binom_p = binom_p;
        spec.tail_quantile = quantile;
        if (spec.kind == DistKind::Explicit) spec.probs = probs;
        spec.validate();
        return spec;
    }
};

struct RansacFlags {
    bool use_ransac = false;
    RansacParams params;

    void add_to(CLI::App* cmd) {
        cmd->add_flag("--ransac", use_ransac, "fit with RANSAC");
        cmd->add_option("--ransac-threshold", params.threshold,
                        "inlier threshold in d' units");
        cmd->add_option("--ransac-iterations", params.iterations,
                        "RANSAC iterations");
        cmd->add_option("--ransac-min-points", params.min_points,
                        "minimum consensus size (0 = max(10, 20%))");
    }
};

std::vector<fs::path> to_paths(const std::vector<std::string>& items) {
    return {items.begin(), items.end()};
}

std::optional<Binning> raw_binning_from(int bins, double lo, double hi,
                                        bool given) {
    if (!given) return std::nullopt;
    return Binning{bins, lo, hi, true};
}

int run(int argc, char** argv) {
    CLI::App app{"TVOR: discrete total variation outlier scoring for histograms"};
    app.set_version_flag("--version", std::string("tvor ") + kVersion);
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "base RNG seed")->capture_default_str();
    app.add_option("--threads", global.threads, "worker threads (0 = auto)");
    app.add_option("--output-dir", global.output_dir,
                   "write outputs into this directory instead of stdout");
    app.add_option("--format", global.format, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    const std::string command_echo = join_argv(argc, argv);
    auto manifest = [&](const std::string& config,
                        std::span<const fs::path> inputs) {
        return make_manifest(command_echo, config,
                             RngSeed{global.seed, 0}, inputs);
    };

    // ---- dtv ----------------------------------------------------------
    auto* dtv_cmd = app.add_subcommand("dtv", "discrete total variation of "
                                              "histogram CSV files");
    std::vector<std::string> dtv_inputs;
    bool dtv_circular = false;
    dtv_cmd->add_option("files", dtv_inputs, "histogram CSV files")->required();
    dtv_cmd->add_flag("--circular", dtv_circular, "include the wrap-around term");
    dtv_cmd->callback([&] {
        const auto paths = expand_inputs(to_paths(dtv_inputs));
        for (const auto& path : paths) {
            const Histogram h = read_histogram_csv(path);
            const std::int64_t v = dtv_circular ? circular_dtv(h) : dtv(h);
            if (paths.size() == 1)
                std::cout << v << "\n";
            else
                std::cout << h.label << "," << v << "\n";
        }
    });

    // ---- expected ------------------------------------------------------
    auto* exp_cmd = app.add_subcommand(
        "expected", "expected DTV of uniform multinomial histograms");
    int exp_n = 2;
    std::int64_t exp_N = 0;
    std::string exp_method = "exact";
    std::vector<int> exp_ns;
    std::vector<std::int64_t> exp_Ns;
    bool exp_hypotheses = false;
    std::int64_t exp_lo = 1, exp_hi = 1;
    double exp_limit = 1e6;
    exp_cmd->add_option("--n", exp_n, "bin count");
    exp_cmd->add_option("--N", exp_N, "sample size");
    exp_cmd->add_option("--method", exp_method,
                        "exact | asymptotic | closed2 | oracle | circular")
        ->check(CLI::IsMember({"exact", "asymptotic", "closed2", "oracle",
                               "circular"}));
    exp_cmd->add_option("--n-list", exp_ns, "grid sweep bin counts")->delimiter(',');
    exp_cmd->add_option("--N-list", exp_Ns, "grid sweep sample sizes")->delimiter(',');
    exp_cmd->add_flag("--check-hypotheses", exp_hypotheses,
                      "verify split approximation / monotonicity / concavity");
    exp_cmd->add_option("--N-lo", exp_lo, "hypothesis sweep lower size");
    exp_cmd->add_option("--N-hi", exp_hi, "hypothesis sweep upper size");
    exp_cmd->add_option("--oracle-limit", exp_limit,
                        "oracle outcome-count refusal limit");
    exp_cmd->callback([&] {
        Sink sink(global, manifest("", {}));
        if (exp_hypotheses) {
            if (exp_ns.empty())
                throw ValidationError("--check-hypotheses needs --n-list");
            auto rep = hypothesis_checks(exp_ns, exp_lo, exp_hi);
            std::ostringstream out;
            out << "n,N,exact,split_approx,rel_dev\n";
            for (const auto& row : rep.approx_rows)
                out << row.n << ',' << row.size << ',' << fmt6(row.exact) << ','
                    << fmt6(row.split_approx) << ',' << fmt6(row.rel_dev) << '\n';
            sink.emit_csv("hypotheses.csv", out.str());
            std::cerr << rep.violations.size() << " violation(s) in "
                      << rep.monotonic_checks << " monotonicity and "
                      << rep.concavity_checks << " concavity checks\n";
            for (const auto& v : rep.violations)
                std::cerr << "violation: " << v.kind << " at n=" << v.n
                          << " N=" << v.size << "\n";
            return;
        }
        if (!exp_ns.empty() || !exp_Ns.empty()) {
            if (exp_ns.empty() || exp_Ns.empty())
                throw ValidationError("grid sweep needs both --n-list and --N-list");
            auto rows = approximation_error_grid(exp_ns, exp_Ns);
            std::ostringstream out;
            out << "n,N,exact,asymptotic,abs_err,rel_err\n";
            for (const auto& r : rows)
                out << r.n << ',' << r.size << ',' << fmt6(r.exact) << ','
                    << fmt6(r.asymptotic) << ',' << fmt6(r.abs_err) << ','
                    << fmt6(r.rel_err) << '\n';
            sink.emit_csv("expected_grid.csv", out.str());
            return;
        }
        double value = 0.0;
        if (exp_method == "exact") value = f_exact(exp_n, exp_N);
        else if (exp_method == "asymptotic") value = f_asymptotic(exp_n, exp_N);
        else if (exp_method == "circular") value = f_circular(exp_n, exp_N);
        else if (exp_method == "closed2") {
            if (exp_n != 2)
                throw ValidationError("--method closed2 applies to n = 2 only");
            value = f2_exact(exp_N);
        } else {
            value = f_oracle(exp_n, static_cast<int>(exp_N), nullptr, exp_limit);
        }
        std::cout << fmt6(value) << "\n";
    });

    // ---- theoretical ----------------------------------------------------
    auto* theo_cmd = app.add_subcommand(
        "theoretical", "theoretical DTV of a named distribution");
    SpecFlags theo_spec;
    theo_spec.add_to(theo_cmd);
    bool theo_closed = false;
    theo_cmd->add_flag("--closed-form", theo_closed,
                       "use the closed-form approximation instead of the "
                       "derived bin probabilities");
    theo_cmd->callback([&] {
        const DistributionSpec spec = theo_spec.build();
        const double value =
            theo_closed ? closed_form_dtv(spec) : theoretical_dtv(spec);
        std::cout << fmt6(value) << "\n";
    });

    // ---- oracle ----------------------------------------------------------
    auto* oracle_cmd = app.add_subcommand(
        "oracle", "brute-force expected DTV by full enumeration");
    int oracle_n = 2;
    int oracle_N = 0;
    std::vector<double> oracle_probs;
    double oracle_limit = 1e6;
    oracle_cmd->add_option("--n", oracle_n, "bin count")->required();
    oracle_cmd->add_option("--N", oracle_N, "sample size")->required();
    oracle_cmd->add_option("--probs", oracle_probs, "bin probabilities")
        ->delimiter(',');
    oracle_cmd->add_option("--limit", oracle_limit, "outcome-count refusal limit");
    oracle_cmd->callback([&] {
        const double value = f_oracle(oracle_n, oracle_N,
                                      oracle_probs.empty() ? nullptr : &oracle_probs,
                                      oracle_limit);
        std::cout << fmt6(value) << "\n";
    });

    // ---- shared input flags for histogram-consuming commands -------------
    struct HistInputs {
        std::vector<std::string> inputs;
        int bins = 0;
        double lo = 0.0, hi = 1.0;
        bool binning_given = false;

        void add_to(CLI::App* cmd) {
            cmd->add_option("inputs", inputs,
                            "histogram CSV files, raw-value files, or directories")
                ->required();
            cmd->add_option("--bins", bins, "raw-value binning: bin count")
                ->each([this](const std::string&) { binning_given = true; });
            cmd->add_option("--lo", lo, "raw-value binning: lower edge");
            cmd->add_option("--hi", hi, "raw-value binning: upper edge");
        }
        std::vector<Histogram> read() const {
            return read_histograms(to_paths(inputs),
                                   raw_binning_from(bins, lo, hi, binning_given));
        }
    };

    // ---- fit -------------------------------------------------------------
    auto* fit_cmd = app.add_subcommand("fit", "fit m = aN + b sqrt(N) to a set "
                                              "of histograms");
    HistInputs fit_inputs;
    fit_inputs.add_to(fit_cmd);
    RansacFlags fit_ransac;
    fit_ransac.add_to(fit_cmd);
    std::vector<std::int64_t> fit_augment_sizes;
    int fit_augment_per_size = 1;
    fit_cmd->add_option("--augment-sizes", fit_augment_sizes,
                        "augment scarce data with subsamples of these sizes "
                        "before fitting")
        ->delimiter(',');
    fit_cmd->add_option("--augment-per-size", fit_augment_per_size,
                        "subsamples drawn per histogram per augment size");
    fit_cmd->callback([&] {
        const auto hists = fit_inputs.read();
        TvorOptions options;
        options.use_ransac = fit_ransac.use_ransac;
        options.ransac = fit_ransac.params;
        options.seed = RngSeed{global.seed, 0};
        std::uint64_t draw = 0;
        for (std::int64_t size : fit_augment_sizes)
            for (const auto& h : hists) {
                if (h.total() < size) continue;
                for (int k = 0; k < fit_augment_per_size; ++k) {
                    Histogram sub = subsample(
                        h, size, derive(options.seed, 0x617567, draw++, k));
                    options.extra_fit_points.push_back(
                        {double(size), double(dtv(sub))});
                }
            }
        const DtvModel model = fit_tvor_model(hists, options);
        Sink sink(global, manifest("", to_paths(fit_inputs.inputs)));
        sink.emit_json("model.json", model_to_json(model));
    });

    // ---- score -----------------------------------------------------------
    auto* score_cmd = app.add_subcommand(
        "score", "rank histograms by d' against the fitted expectation");
    HistInputs score_inputs;
    score_inputs.add_to(score_cmd);
    RansacFlags score_ransac;
    score_ransac.add_to(score_cmd);
    std::string score_model_path;
    score_cmd->add_option("--model", score_model_path,
                          "score against a saved model instead of refitting");
    score_cmd->callback([&] {
        const auto hists = score_inputs.read();
        std::vector<ScoreReport> reports;
        if (!score_model_path.empty()) {
            const DtvModel model = read_model_json(score_model_path);
            for (const auto& h : hists) {
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
        } else {
            TvorOptions options;
            options.use_ransac = score_ransac.use_ransac;
            options.ransac = score_ransac.params;
            options.seed = RngSeed{global.seed, 0};
            options.degenerate_fallback = true;
            reports = run_tvor(hists, options);
        }
        Sink sink(global, manifest("", to_paths(score_inputs.inputs)));
        emit_reports(global, sink, "scores", reports);
    });

    // ---- baseline ----------------------------------------------------------
    auto* base_cmd = app.add_subcommand(
        "baseline", "rank histograms with the leave-one-out chi-squared test");
    HistInputs base_inputs;
    base_inputs.add_to(base_cmd);
    double base_epsilon = 1e-6;
    base_cmd->add_option("--epsilon", base_epsilon,
                         "small positive stabilizer for expected bins");
    base_cmd->callback([&] {
        const auto hists = base_inputs.read();
        const auto reports = run_chi2_baseline(hists, base_epsilon);
        Sink sink(global, manifest("", to_paths(base_inputs.inputs)));
        emit_reports(global, sink, "baseline", reports);
    });

    // ---- indices -------------------------------------------------------------
    auto* idx_cmd = app.add_subcommand(
        "indices", "Whipple and Myers digit-preference indices of value lists");
    std::vector<std::string> idx_inputs;
    std::int64_t idx_lo = 0, idx_hi = 0;
    bool idx_range_given = false;
    idx_cmd->add_option("inputs", idx_inputs, "value files or directories")
        ->required();
    idx_cmd->add_option("--range-lo", idx_lo, "inclusive lower value bound")
        ->each([&](const std::string&) { idx_range_given = true; });
    idx_cmd->add_option("--range-hi", idx_hi, "inclusive upper value bound");
    idx_cmd->callback([&] {
        const auto lists = read_value_lists(to_paths(idx_inputs));
        std::optional<ValueRange> range;
        if (idx_range_given) range = ValueRange{idx_lo, idx_hi};
        std::ostringstream out;
        out << "label,whipple,myers\n";
        for (const auto& list : lists)
            out << list.label << ',' << fmt6(whipple_index(list.values, range))
                << ',' << fmt6(myers_index(list.values, range)) << '\n';
        Sink sink(global, manifest("", to_paths(idx_inputs)));
        sink.emit_csv("indices.csv", out.str());
    });

    // ---- mc-table ------------------------------------------------------------
    auto* mc_cmd = app.add_subcommand(
        "mc-table", "Monte Carlo (size -> mean/std DTV) lookup table");
    SpecFlags mc_spec;
    mc_spec.add_to(mc_cmd, false);
    std::vector<std::string> mc_pool_inputs;
    std::vector<std::int64_t> mc_sizes;
    std::int64_t mc_trials = 1000;
    mc_cmd->add_option("--pool", mc_pool_inputs,
                       "pool histogram CSVs; trials subsample the pooled data");
    mc_cmd->add_option("--sizes", mc_sizes, "table sizes")->required()->delimiter(',');
    mc_cmd->add_option("--trials", mc_trials, "trials per size");
    mc_cmd->callback([&] {
        const RngSeed seed{global.seed, 0};
        McTable table;
        std::vector<fs::path> inputs;
        if (!mc_pool_inputs.empty()) {
            inputs = to_paths(mc_pool_inputs);
            auto hists = read_histograms(inputs, std::nullopt);
            Histogram pool = hists.front();
            pool.label = "pool";
            for (std::size_t i = 1; i < hists.size(); ++i)
                for (std::size_t j = 0; j < pool.counts.size(); ++j)
                    pool.counts[j] += hists[i].counts[j];
            table = build_mc_table(pool, mc_sizes, mc_trials, seed,
                                   resolve_threads(global.threads));
        } else {
            if (mc_spec.kind.empty())
                throw ValidationError("mc-table needs either --kind or --pool");
            table = build_mc_table(mc_spec.build(), mc_sizes, mc_trials, seed,
                                   resolve_threads(global.threads));
        }
        std::ostringstream out;
        write_mc_table_csv(table, out);
        Sink sink(global, manifest("", inputs));
        sink.emit_csv("mc_table.csv", out.str());
    });

    // ---- simulate ---------------------------------------------------------------
    auto* sim_cmd = app.add_subcommand(
        "simulate", "planted-outlier mean-rank experiment from a config file");
    std::string sim_config;
    sim_cmd->add_option("--config", sim_config, "key=value experiment config")
        ->required();
    sim_cmd->callback([&] {
        const fs::path config_path(sim_config);
        ExperimentConfig cfg = experiment_config_from_file(config_path);
        cfg.threads = resolve_threads(global.threads);
        if (global.seed != 0) cfg.seed.base = global.seed;
        const auto kv = read_config_file(config_path);
        const bool heaping = kv.count("heap.fraction") > 0 ||
                             (kv.count("experiment") && kv.at("experiment") == "heaping");
        const MeanRankResult result =
            heaping ? run_heaping_experiment(cfg) : run_distribution_experiment(cfg);
        std::ostringstream out;
        out << "method,mean_rank,ideal,trials,total_histograms\n";
        for (const auto& [method, rank] : result.mean_ranks)
            out << to_string(method) << ',' << fmt6(rank) << ',' << fmt6(result.ideal)
                << ',' << result.trials << ',' << result.total_histograms << '\n';
        std::ostringstream config_echo;
        for (const auto& [k, v] : kv) config_echo << k << '=' << v << ';';
        std::vector<fs::path> inputs{config_path};
        Sink sink(global, make_manifest(command_echo, config_echo.str(),
                                        cfg.seed, inputs));
        sink.emit_csv("mean_ranks.csv", out.str());
    });

    // ---- census ---------------------------------------------------------------
    auto* census_cmd = app.add_subcommand(
        "census", "rank birth-year lists (one value per line, one bin per year)");
    std::vector<std::string> census_inputs;
    RansacFlags census_ransac;
    std::string census_table_path;
    std::string census_reference;
    std::vector<std::int64_t> census_sizes;
    std::int64_t census_trials = 1000;
    bool census_extrapolate = false;
    census_cmd->add_option("inputs", census_inputs, "value files or directories")
        ->required();
    census_ransac.add_to(census_cmd);
    census_cmd->add_option("--mc-table", census_table_path,
                           "score d'' against this saved table");
    census_cmd->add_option("--reference", census_reference,
                           "build the d'' table by subsampling this reference "
                           "value file");
    census_cmd->add_option("--table-sizes", census_sizes,
                           "subsample sizes for --reference")
        ->delimiter(',');
    census_cmd->add_option("--table-trials", census_trials,
                           "subsample trials per size for --reference");
    census_cmd->add_flag("--extrapolate", census_extrapolate,
                         "extrapolate d'' outside the table range");
    census_cmd->callback([&] {
        const auto lists = read_value_lists(to_paths(census_inputs));
        CensusOptions options;
        options.use_ransac = census_ransac.use_ransac;
        options.ransac = census_ransac.params;
        options.seed = RngSeed{global.seed, 0};
        options.allow_extrapolation = census_extrapolate;
        McTable table;
        if (!census_table_path.empty()) {
            table = read_mc_table_csv(census_table_path);
            options.reference_table = &table;
        } else if (!census_reference.empty()) {
            if (census_sizes.empty())
                throw ValidationError("--reference needs --table-sizes");
            const auto ref_values = read_integer_values_file(census_reference);
            std::int64_t lo = ref_values.front(), hi = ref_values.front();
            for (auto v : ref_values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            ValueList ref{"reference", ref_values};
            Histogram pool = per_year_histogram(ref, lo, hi);
            table = build_mc_table(pool, census_sizes, census_trials,
                                   RngSeed{global.seed, 1},
                                   resolve_threads(global.threads));
            options.reference_table = &table;
        }
        const CensusResult result = run_census_pipeline(lists, options);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

        Sink sink(global, manifest("", to_paths(census_inputs)));
        emit_reports(global, sink, "census_d1", result.d1);
        if (!result.d2.empty()) emit_reports(global, sink, "census_d2", result.d2);
        std::ostringstream scatter;
        scatter << "label,N,dtv,predicted\n";
        for (const auto& row : result.scatter)
            scatter << row.label << ',' << row.size << ',' << row.dtv << ','
                    << fmt6(row.predicted) << '\n';
        sink.emit_csv("census_scatter.csv", scatter.str());
        std::ostringstream model_note;
        std::cerr << "model: a=" << fmt6(result.model.a)
                  << " b=" << fmt6(result.model.b) << " over years "
                  << result.year_min << ".." << result.year_max << "\n";
    });

    // ---- partition -------------------------------------------------------------
    auto* part_cmd = app.add_subcommand(
        "partition", "score per-group histograms inside an extended comparison "
                     "set");
    std::vector<std::string> part_lists;
    std::string part_groups;
    RansacFlags part_ransac;
    bool part_all = false;
    part_cmd->add_option("--lists", part_lists, "comparison value files or "
                                                "directories")
        ->required();
    part_cmd->add_option("--groups", part_groups, "value,group CSV of the "
                                                  "partitioned list")
        ->required();
    part_ransac.add_to(part_cmd);
    part_cmd->add_flag("--all", part_all, "emit the whole extended set, not "
                                          "just the groups");
    part_cmd->callback([&] {
        const auto lists = read_value_lists(to_paths(part_lists));
        const auto grouped = read_group_file(part_groups);
        TvorOptions options;
        options.use_ransac = part_ransac.use_ransac;
        options.ransac = part_ransac.params;
        options.seed = RngSeed{global.seed, 0};
        const PartitionResult result =
            run_partition_analysis(lists, grouped, options);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        std::vector<ScoreReport> reports;
        if (part_all) {
            reports = result.reports;
        } else {
            for (std::size_t idx : result.group_indices)
                reports.push_back(result.reports[idx]);
        }
        std::vector<fs::path> inputs = to_paths(part_lists);
        inputs.emplace_back(part_groups);
        Sink sink(global, manifest("", inputs));
        emit_reports(global, sink, "partition", reports);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const NumericalGuardError& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
