#include "tvor/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "tvor/version.hpp"

namespace tvor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string location(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::string trimmed(std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && is_space(static_cast<unsigned char>(s[start]))) ++start;
    return s.substr(start);
}

std::int64_t parse_int(const std::string& text, const fs::path& path,
                       std::size_t line) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ValidationError(location(path, line) + ": expected integer, got '" +
                              text + "'");
    return value;
}

double parse_double(const std::string& text, const fs::path& path,
                    std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(location(path, line) + ": expected number, got '" +
                              text + "'");
    }
}

std::ifstream open_or_throw(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    return in;
}

// %.6g, matching the reporting precision used throughout.
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double round6(double v) {
    return std::stod(fmt6(v));
}

} // namespace

Histogram read_histogram_csv(const fs::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || trimmed(line) != "bin,count")
        throw ValidationError(location(path, 1) +
                              ": expected histogram header 'bin,count'");
    Histogram h;
    h.label = path.stem().string();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trimmed(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos)
            throw ValidationError(location(path, lineno) + ": expected 'bin,count'");
        const std::int64_t bin = parse_int(row.substr(0, comma), path, lineno);
        const std::int64_t count = parse_int(row.substr(comma + 1), path, lineno);
        if (bin != static_cast<std::int64_t>(h.counts.size()))
            throw ValidationError(location(path, lineno) + ": bin index " +
                                  std::to_string(bin) + " out of order, expected " +
                                  std::to_string(h.counts.size()));
        if (count < 0)
            throw ValidationError(location(path, lineno) + ": negative count");
        h.counts.push_back(count);
    }
    if (h.counts.empty())
        throw ValidationError(path.string() + ": histogram has no bins");
    return h;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
    out << "bin,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << i << ',' << h.counts[i] << '\n';
}

std::vector<double> read_values_file(const fs::path& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trimmed(line);
        if (row.empty()) continue;
        values.push_back(parse_double(row, path, lineno));
    }
    return values;
}

std::vector<std::int64_t> read_integer_values_file(const fs::path& path) {
    const std::vector<double> raw = read_values_file(path);
    std::vector<std::int64_t> values;
    values.reserve(raw.size());
    for (double v : raw) {
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9)
            throw ValidationError(path.string() + ": value " + std::to_string(v) +
                                  " is not an integer");
        values.push_back(static_cast<std::int64_t>(r));
    }
    return values;
}

std::vector<fs::path> expand_inputs(std::span<const fs::path> inputs) {
    std::vector<fs::path> files;
    for (const auto& input : inputs) {
        if (fs::is_directory(input)) {
            std::vector<fs::path> dir_files;
            for (const auto& entry : fs::directory_iterator(input))
                if (entry.is_regular_file()) dir_files.push_back(entry.path());
            std::sort(dir_files.begin(), dir_files.end());
            files.insert(files.end(), dir_files.begin(), dir_files.end());
        } else if (fs::exists(input)) {
            files.push_back(input);
        } else {
            throw ValidationError("input '" + input.string() + "' does not exist");
        }
    }
    return files;
}

namespace {

bool looks_like_histogram_csv(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    return in && std::getline(in, line) && trimmed(line) == "bin,count";
}

Histogram bin_raw_values(const std::vector<double>& values, const Binning& binning,
                         const std::string& label) {
    Histogram h;
    h.label = label;
    h.counts.assign(static_cast<std::size_t>(binning.n), 0);
    const double width = (binning.hi - binning.lo) / binning.n;
    for (double v : values) {
        if (v < binning.lo || v > binning.hi) {
            if (!binning.clamp) continue;
            v = std::clamp(v, binning.lo, binning.hi);
        }
        auto idx = static_cast<std::int64_t>((v - binning.lo) / width);
        idx = std::clamp<std::int64_t>(idx, 0, binning.n - 1);
        ++h.counts[static_cast<std::size_t>(idx)];
    }
    return h;
}

} // namespace

std::vector<Histogram> read_histograms(std::span<const fs::path> inputs,
                                       const std::optional<Binning>& raw_binning) {
    const std::vector<fs::path> files = expand_inputs(inputs);
    if (files.empty())
        throw ValidationError("no inputs");

    std::vector<Histogram> hists;
    hists.reserve(files.size());
    bool any_csv = false, any_raw = false;
    for (const auto& file : files) {
        if (looks_like_histogram_csv(file)) {
            any_csv = true;
            hists.push_back(read_histogram_csv(file));
        } else {
            any_raw = true;
            if (!raw_binning)
                throw ValidationError("'" + file.string() +
                                      "' is a raw-values file but no binning was "
                                      "given (--bins/--lo/--hi)");
            if (raw_binning->n < 1)
                throw ValidationError("raw-values binning needs at least 1 bin");
            hists.push_back(bin_raw_values(read_values_file(file), *raw_binning,
                                           file.stem().string()));
        }
        if (any_csv && any_raw)
            throw ValidationError("mixed input formats: '" + file.string() +
                                  "' does not match the earlier files");
    }
    const std::size_t n = hists.front().bins();
    for (std::size_t i = 1; i < hists.size(); ++i)
        if (hists[i].bins() != n)
            throw ValidationError("inconsistent bin counts: '" + files[0].string() +
                                  "' has " + std::to_string(n) + " bins but '" +
                                  files[i].string() + "' has " +
                                  std::to_string(hists[i].bins()));
    for (const auto& h : hists) h.validate();
    return hists;
}

std::vector<ValueList> read_value_lists(std::span<const fs::path> inputs) {
    const std::vector<fs::path> files = expand_inputs(inputs);
    if (files.empty())
        throw ValidationError("no inputs");
    std::vector<ValueList> lists;
    lists.reserve(files.size());
    for (const auto& file : files)
        lists.push_back({file.stem().string(), read_integer_values_file(file)});
    return lists;
}

std::vector<std::pair<std::int64_t, std::string>> read_group_file(
    const fs::path& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<std::pair<std::int64_t, std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trimmed(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos)
            throw ValidationError(location(path, lineno) + ": expected 'value,group'");
        rows.emplace_back(parse_int(trimmed(row.substr(0, comma)), path, lineno),
                          trimmed(row.substr(comma + 1)));
    }
    if (rows.empty())
        throw ValidationError(path.string() + ": no grouped values");
    return rows;
}

McTable read_mc_table_csv(const fs::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line) || trimmed(line) != "N,mean,std,trials")
        throw ValidationError(location(path, 1) +
                              ": expected header 'N,mean,std,trials'");
    McTable table;
    table.source = path.stem().string();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trimmed(line);
        if (row.empty()) continue;
        std::stringstream ss(row);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 4)
            throw ValidationError(location(path, lineno) + ": expected 4 fields");
        McRow r;
        r.size = parse_int(fields[0], path, lineno);
        r.mean = parse_double(fields[1], path, lineno);
        r.stddev = parse_double(fields[2], path, lineno);
        r.trials = parse_int(fields[3], path, lineno);
        table.rows.push_back(r);
    }
    if (table.rows.empty())
        throw ValidationError(path.string() + ": table has no rows");
    std::sort(table.rows.begin(), table.rows.end(),
              [](const McRow& a, const McRow& b) { return a.size < b.size; });
    return table;
}

void write_mc_table_csv(const McTable& table, std::ostream& out) {
    out << "N,mean,std,trials\n";
    for (const McRow& r : table.rows)
        out << r.size << ',' << fmt6(r.mean) << ',' << fmt6(r.stddev) << ','
            << r.trials << '\n';
}

DtvModel read_model_json(const fs::path& path) {
    std::ifstream in = open_or_throw(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
    DtvModel m;
    try {
        m.a = j.at("a").get<double>();
        m.b = j.at("b").get<double>();
        m.fit_kind = fit_kind_from_string(j.at("fit_kind").get<std::string>());
        m.residual_scale = j.value("residual_scale", 0.0);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": bad model schema (" + e.what() + ")");
    }
    return m;
}

std::string model_to_json(const DtvModel& model) {
    json j{{"a", model.a},
           {"b", model.b},
           {"fit_kind", to_string(model.fit_kind)},
           {"residual_scale", model.residual_scale}};
    return j.dump(2) + "\n";
}

RunManifest make_manifest(const std::string& command, const std::string& config,
                          RngSeed seed, std::span<const fs::path> inputs) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.seed_base = seed.base;
    m.seed_stream = seed.stream;
    m.version = kVersion;
    for (const auto& path : inputs) {
        char digest[32];
        std::snprintf(digest, sizeof digest, "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(path)));
        m.input_digests.emplace_back(path.string(), digest);
    }
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
    return m;
}

std::string manifest_to_json(const RunManifest& manifest) {
    json digests = json::object();
    for (const auto& [path, digest] : manifest.input_digests) digests[path] = digest;
    json j{{"command", manifest.command}, {"config", manifest.config},
           {"seed", {{"base", manifest.seed_base}, {"stream", manifest.seed_stream}}},
           {"version", manifest.version}, {"inputs", digests},
           {"timestamp", manifest.timestamp}};
    return j.dump(2) + "\n";
}

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "' for digest");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[8192];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return hash;
}

void write_reports_csv(std::span<const ScoreReport> reports, std::ostream& out) {
    out << "label,N,dtv,predicted,score,rank,method\n";
    for (const auto& r : reports) {
        out << r.label << ',' << r.size << ',' << r.dtv << ',';
        if (r.predicted) out << fmt6(*r.predicted);
        out << ',' << fmt6(r.score) << ',' << r.rank << ',' << to_string(r.method)
            << '\n';
    }
}

std::string reports_to_json(std::span<const ScoreReport> reports,
                            const RunManifest& manifest) {
    json arr = json::array();
    for (const auto& r : reports) {
        json item{{"label", r.label}, {"N", r.size},       {"dtv", r.dtv},
                  {"score", round6(r.score)}, {"rank", r.rank},
                  {"method", to_string(r.method)}};
        item["predicted"] = r.predicted ? json(round6(*r.predicted)) : json(nullptr);
        arr.push_back(std::move(item));
    }
    json j{{"manifest", json::parse(manifest_to_json(manifest))}, {"reports", arr}};
    return j.dump(2) + "\n";
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in = open_or_throw(path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string row = trimmed(line);
        const auto hash = row.find('#');
        if (hash != std::string::npos) row = trimmed(row.substr(0, hash));
        if (row.empty()) continue;
        const auto eq = row.find('=');
        if (eq == std::string::npos)
            throw ValidationError(location(path, lineno) + ": expected 'key=value'");
        kv[trimmed(row.substr(0, eq))] = trimmed(row.substr(eq + 1));
    }
    return kv;
}

namespace {

std::optional<std::string> get(const std::map<std::string, std::string>& kv,
                               const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': expected number, got '" +
                              v + "'");
    }
}

std::int64_t to_int(const std::string& v, const std::string& key) {
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ValidationError("config key '" + key + "': expected integer, got '" +
                              v + "'");
    return out;
}

} // namespace

DistributionSpec spec_from_config(const std::map<std::string, std::string>& kv,
                                  const std::string& prefix) {
    const auto kind_text = get(kv, prefix + ".kind");
    if (!kind_text)
        throw ValidationError("config is missing key '" + prefix + ".kind'");
    DistributionSpec spec;
    spec.kind = dist_kind_from_string(*kind_text);

    auto num = [&](const std::string& name) -> std::optional<double> {
        // per-spec key wins over the shared key
        if (auto v = get(kv, prefix + "." + name)) return to_double(*v, prefix + "." + name);
        if (auto v = get(kv, name)) return to_double(*v, name);
        return std::nullopt;
    };

    if (auto n = num("n")) spec.binning.n = static_cast<int>(*n);
    if (auto c = num("c")) {
        spec.binning.lo = -*c;
        spec.binning.hi = *c;
    }
    if (auto lo = num("lo")) spec.binning.lo = *lo;
    if (auto hi = num("hi")) spec.binning.hi = *hi;
    if (auto sigma = num("sigma")) spec.sigma = *sigma;
    if (auto mu = num("mu")) spec.mu = *mu;
    if (auto alpha = num("alpha")) spec.alpha = *alpha;
    if (auto beta = num("beta")) spec.beta = *beta;
    if (auto a = num("tri.a")) spec.tri_a = *a;
    if (auto b = num("tri.b")) spec.tri_b = *b;
    if (auto c = num("tri.c")) spec.tri_c = *c;
    if (auto p = num("p")) spec.geom_p = *p;
    if (auto lambda = num("lambda")) spec.lambda = *lambda;
    if (auto t = num("binom.trials")) spec.binom_trials = static_cast<int>(*t);
    if (auto p = num("binom.p")) spec.binom_p = *p;
    if (auto q = num("quantile")) spec.tail_quantile = *q;

    // Beta and triangular default to their natural [0, 1] support unless an
    // interval was given explicitly.
    const bool interval_given =
        get(kv, prefix + ".lo") || get(kv, prefix + ".hi") || get(kv, "lo") ||
        get(kv, "hi") || get(kv, prefix + ".c") || get(kv, "c");
    if (!interval_given &&
        (spec.kind == DistKind::Beta || spec.kind == DistKind::Triangular ||
         spec.kind == DistKind::Uniform)) {
        spec.binning.lo = spec.kind == DistKind::Triangular ? spec.tri_a : 0.0;
        spec.binning.hi = spec.kind == DistKind::Triangular ? spec.tri_b : 1.0;
    }
    spec.validate();
    return spec;
}

ExperimentConfig experiment_config_from_file(const fs::path& path) {
    const auto kv = read_config_file(path);
    ExperimentConfig cfg;
    cfg.inlier_spec = spec_from_config(kv, "inlier");
    cfg.outlier_spec = spec_from_config(kv, "outlier");
    if (auto v = get(kv, "inliers")) cfg.inlier_count = static_cast<int>(to_int(*v, "inliers"));
    if (auto v = get(kv, "outliers")) cfg.outlier_count = static_cast<int>(to_int(*v, "outliers"));
    if (auto v = get(kv, "size.min")) cfg.size_min = to_int(*v, "size.min");
    if (auto v = get(kv, "size.max")) cfg.size_max = to_int(*v, "size.max");
    if (auto v = get(kv, "heap.fraction")) cfg.heap_fraction = to_double(*v, "heap.fraction");
    if (auto v = get(kv, "heap.period")) cfg.heap_period = static_cast<int>(to_int(*v, "heap.period"));
    if (auto v = get(kv, "trials")) cfg.trials = to_int(*v, "trials");
    if (auto v = get(kv, "seed")) cfg.seed.base = static_cast<std::uint64_t>(to_int(*v, "seed"));
    if (auto v = get(kv, "ransac.threshold")) cfg.ransac.threshold = to_double(*v, "ransac.threshold");
    if (auto v = get(kv, "ransac.iterations")) cfg.ransac.iterations = static_cast<int>(to_int(*v, "ransac.iterations"));
    if (auto v = get(kv, "ransac.min_points")) cfg.ransac.min_points = static_cast<int>(to_int(*v, "ransac.min_points"));
    if (auto v = get(kv, "epsilon")) cfg.chi2_epsilon = to_double(*v, "epsilon");
    if (auto v = get(kv, "methods")) {
        cfg.methods.clear();
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ','))
            cfg.methods.push_back(method_choice_from_string(trimmed(item)));
    }
    return cfg;
}

} // namespace tvor
