#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "monotone/error.hpp"
#include "monotone/experiments.hpp"
#include "monotone/ot.hpp"
#include "monotone/ranks.hpp"

namespace monotone::io {

using json = nlohmann::json;

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// ---------------------------------------------------------------------------
// Config text

/// Parses YAML (a superset of the JSON accepted here) into JSON. Unquoted
/// scalars become integers, reals, booleans or null when they parse as such.
json parse_config_text(const std::string& text);
json load_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);
/// Digest of the canonical dump (sorted keys, no whitespace).
std::string config_hash(const json& config);

/// Reads keys of one config object, remembering which were consumed so
/// that finish() can reject unknown (usually misspelled) keys.
class Section {
public:
    Section(const json& node, std::string path);

    bool has(const std::string& key) const;
    const json& raw(const std::string& key) const;
    Section child(const std::string& key) const;
    std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double real(const std::string& key) const;
    double real(const std::string& key, double fallback) const;
    std::uint64_t count(const std::string& key) const;
    std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string text(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::size_t> counts(const std::string& key) const;

    void finish() const;

private:
    const json* node_;
    std::string path_;
    mutable std::set<std::string> used_;
};

MeasureSpec parse_measure(const Section& s);
HVec parse_hvec(const json& node, const std::string& path);
std::vector<HVec> parse_points(const json& node, const std::string& path);
CompactSet parse_compact_set(const Section& s);
SemiDiscreteOptions parse_semidiscrete(const Section& s);
PopulationOptions parse_population(const Section& s);
CertifyOptions parse_certify(const Section& s);

StabilityConfig parse_stability(const Section& s);
LocalGcConfig parse_local_gc(const Section& s);
CltConfig parse_clt(const Section& s);
CounterexampleAConfig parse_counterexample_a(const Section& s);
CounterexampleBConfig parse_counterexample_b(const Section& s);

// ---------------------------------------------------------------------------
// Output

/// Shortest decimal string that reads back to the same double; locale independent.
std::string format_real(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <class... Cells>
    void add(const Cells&... cells) {
        rows.push_back({cell(cells)...});
    }
    std::string str() const;

    static std::string cell(double v) { return format_real(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    template <class I, std::enable_if_t<std::is_integral_v<I> && !std::is_same_v<I, bool>, int> = 0>
    static std::string cell(I v) {
        return std::to_string(v);
    }
};

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Files staged in memory and written only by commit(), so a failed run
/// leaves nothing behind.
class OutputSet {
public:
    void stage(const std::string& name, std::string content);
    /// Writes every staged file atomically into dir (created if missing) and
    /// returns the written paths in staging order.
    std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) const;
    bool empty() const noexcept { return files_.empty(); }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<std::string> outputs;
    std::map<std::string, double> timings;
    std::string started_at;  // UTC, ISO 8601

    json to_json() const;
};

std::string version_string();
std::string utc_timestamp();

// ---------------------------------------------------------------------------
// Exports

std::string coupling_csv(const Coupling& coupling);
std::string dual_csv(const DualSolution& dual);
json potential_json(const MaxAffinePotential& psi);
json certificate_json(const MonotonicityCertificate& cert);
std::string rank_csv(const RankMap& rank);

}  // namespace monotone::io
