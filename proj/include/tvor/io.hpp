#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvor/distribution.hpp"
#include "tvor/experiments.hpp"
#include "tvor/histogram.hpp"
#include "tvor/model.hpp"

namespace tvor {

// Canonical histogram CSV: header `bin,count`, then one row per bin with the
// 0-based index. Reading then writing a canonical file is byte-identical.
Histogram read_histogram_csv(const std::filesystem::path& path);
void write_histogram_csv(const Histogram& h, std::ostream& out);

// Raw-values file: one numeric value per line (blank lines allowed).
std::vector<double> read_values_file(const std::filesystem::path& path);
std::vector<std::int64_t> read_integer_values_file(const std::filesystem::path& path);

// Expands directories (sorted), keeps files as-is.
std::vector<std::filesystem::path> expand_inputs(
    std::span<const std::filesystem::path> inputs);

// Reads a comparison set. Histogram-CSV files are detected by their header;
// anything else is treated as a raw-values file and binned (all raw files
// share one binning). Mixing the two formats, inconsistent bin counts,
// negative counts, or an empty input set are rejected with diagnostics.
// Labels are the file stems.
std::vector<Histogram> read_histograms(std::span<const std::filesystem::path> inputs,
                                       const std::optional<Binning>& raw_binning);

// Raw-values lists for the census/indices paths (values must be integers).
std::vector<ValueList> read_value_lists(std::span<const std::filesystem::path> inputs);

// `value,group` CSV (no header) for partition analysis.
std::vector<std::pair<std::int64_t, std::string>> read_group_file(
    const std::filesystem::path& path);

McTable read_mc_table_csv(const std::filesystem::path& path);
void write_mc_table_csv(const McTable& table, std::ostream& out);

DtvModel read_model_json(const std::filesystem::path& path);
std::string model_to_json(const DtvModel& model);

// Reproducibility record emitted with every output.
struct RunManifest {
    std::string command;
    std::string config;
    std::uint64_t seed_base = 0;
    std::uint64_t seed_stream = 0;
    std::string version;
    std::vector<std::pair<std::string, std::string>> input_digests;
    std::string timestamp; // ISO 8601 UTC
};

RunManifest make_manifest(const std::string& command, const std::string& config,
                          RngSeed seed,
                          std::span<const std::filesystem::path> inputs);
std::string manifest_to_json(const RunManifest& manifest);

// FNV-1a 64-bit content digest (reproducibility metadata, not cryptographic).
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

void write_reports_csv(std::span<const ScoreReport> reports, std::ostream& out);
std::string reports_to_json(std::span<const ScoreReport> reports,
                            const RunManifest& manifest);

// Flat `key=value` config file with `#` comments.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Builds a distribution spec from config keys under `prefix` (e.g.
// "inlier.kind") plus the shared binning keys n / c / lo / hi.
DistributionSpec spec_from_config(const std::map<std::string, std::string>& kv,
                                  const std::string& prefix);

ExperimentConfig experiment_config_from_file(const std::filesystem::path& path);

} // namespace tvor
