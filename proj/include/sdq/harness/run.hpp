#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdq/harness/config.hpp"

namespace sdq::harness {

std::string code_version();

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Columns plus rows of doubles, written with %.17g.
struct Table {
    std::string name;  // file stem, e.g. "fig1"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// `# ` header lines (config echo and a timestamp line), the column line, rows.
std::string render_csv(const Table& table, const ExperimentConfig& config, const std::string& timestamp);

/// Payload only: everything after the header block.
std::string csv_payload(const std::string& csv);

struct OutputFile {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::size_t rows = 0;
};

struct RunManifest {
    std::string experiment;
    std::string config_sha256;
    std::string version;
    double wall_time = 0.0;  // s
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<OutputFile> outputs;
    bool partial = false;
    std::vector<std::string> errors;

    nlohmann::json to_json() const;
};

/// Hash of the canonical (dimensionless) config, output and threads left out.
std::string config_hash(const ExperimentConfig& config);

/// What a pipeline produced, before anything touches the disk.
struct PipelineOutput {
    std::vector<Table> tables;
    std::vector<std::pair<std::string, nlohmann::json>> documents;  // extra JSON files
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<std::string> errors;  // per cell, the run carries on
};

PipelineOutput run_pipeline(const ExperimentConfig& config);

/// Validates, runs, then writes CSVs, extra JSON and manifest.json into
/// config.output. Nothing is written if validation or the pipeline throws.
RunManifest run_experiment(const ExperimentConfig& config);

unsigned resolve_threads(unsigned requested);

}  // namespace sdq::harness
