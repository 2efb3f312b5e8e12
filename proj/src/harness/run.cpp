#include "sdq/harness/run.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "sdq/errors.hpp"

#ifndef SDQ_VERSION
#define SDQ_VERSION "unknown"
#endif

namespace sdq::harness {

using nlohmann::json;

std::string code_version() { return SDQ_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return sha256_hex(s.str());
}

std::string render_csv(const Table& table, const ExperimentConfig& config, const std::string& timestamp) {
    std::string out;
    out += "# sdq " + code_version() + "\n";
    out += "# experiment: " + to_string(config.experiment) + "\n";
    out += "# config: " + config_to_json(config).dump() + "\n";
    out += "# generated: " + timestamp + "\n";
    for (std::size_t k = 0; k < table.columns.size(); ++k) out += (k ? "," : "") + table.columns[k];
    out += "\n";
    char buf[32];
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw Error("row width does not match the columns of " + table.name);
        for (std::size_t k = 0; k < row.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", row[k]);
            if (k) out += ',';
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::string csv_payload(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("#", 0) != 0) out += line + "\n";
    return out;
}

json RunManifest::to_json() const {
    json files = json::array();
    for (const auto& f : outputs) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"rows", f.rows}});
    return {{"experiment", experiment}, {"config_sha256", config_sha256}, {"version", version},
            {"wall_time_s", wall_time}, {"diagnostics", diagnostics},    {"outputs", files},
            {"partial", partial},       {"errors", errors}};
}

std::string config_hash(const ExperimentConfig& config) {
    // where and how fast a run goes does not change its numbers
    auto j = config_to_json(config);
    j.erase("output");
    j.erase("threads");
    return sha256_hex(j.dump());
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << bytes;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto result = run_pipeline(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::filesystem::path dir(config.output);
    std::filesystem::create_directories(dir);
    RunManifest m;
    m.experiment = to_string(config.experiment);
    m.config_sha256 = config_hash(config);
    m.version = code_version();
    m.wall_time = wall;
    m.diagnostics = result.diagnostics;
    m.errors = result.errors;
    m.partial = !result.errors.empty();

    const std::string stamp = utc_now();
    for (const auto& t : result.tables) {
        const std::string name = t.name + ".csv";
        const std::string bytes = render_csv(t, config, stamp);
        write_file(dir / name, bytes);
        m.outputs.push_back({name, sha256_hex(bytes), t.rows.size()});
    }
    for (const auto& [stem, doc] : result.documents) {
        const std::string name = stem + ".json";
        const std::string bytes = doc.dump(2) + "\n";
        write_file(dir / name, bytes);
        m.outputs.push_back({name, sha256_hex(bytes), 0});
    }
    write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
    return m;
}

}  // namespace sdq::harness
