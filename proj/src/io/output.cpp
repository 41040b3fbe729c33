#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>

#include "monotone/io.hpp"

#ifndef MONOTONE_VERSION
#define MONOTONE_VERSION "0.0.0"
#endif

namespace monotone::io {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw InvalidInput("cannot format number");
    return std::string(buf, end);
}

std::string CsvTable::str() const {
    auto line = [](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            const std::string& c = cells[k];
            if (c.find_first_of(",\"\n") == std::string::npos) {
                out += c;
            } else {
                out += '"';
                for (char ch : c) {
                    if (ch == '"') out += '"';
                    out += ch;
                }
                out += '"';
            }
        }
        out += '\n';
        return out;
    };
    std::string out = line(header);
    for (const auto& r : rows) out += line(r);
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void OutputSet::stage(const std::string& name, std::string content) {
    for (auto& [n, c] : files_) {
        if (n == name) {
            c = std::move(content);
            return;
        }
    }
    files_.emplace_back(name, std::move(content));
}

std::vector<std::filesystem::path> OutputSet::commit(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : files_) {
        write_atomic(dir / name, content);
        written.push_back(dir / name);
    }
    return written;
}

json RunManifest::to_json() const {
    json timing = json::object();
    for (const auto& [k, v] : timings) timing[k] = v;
    return json{{"command", command},         {"config_hash", config_hash}, {"seed", seed},
                {"version", version},         {"outputs", outputs},         {"timings_seconds", timing},
                {"started_at", started_at}};
}

std::string version_string() { return MONOTONE_VERSION; }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::string join_coords(const HVec& h) {
    std::string out;
    for (std::size_t k = 0; k < h.dim(); ++k) {
        if (k) out += ' ';
        out += format_real(h[k]);
    }
    return out;
}

json hvec_json(const HVec& h) { return json(std::vector<double>(h.coeffs().begin(), h.coeffs().end())); }

}  // namespace

std::string coupling_csv(const Coupling& coupling) {
    CsvTable t{{"i", "j", "mass", "x", "y"}, {}};
    for (const auto& e : coupling.entries()) {
        t.add(e.i, e.j, e.mass, join_coords(coupling.src().point(e.i)), join_coords(coupling.tgt().point(e.j)));
    }
    return t.str();
}

std::string dual_csv(const DualSolution& dual) {
    CsvTable t{{"side", "index", "value"}, {}};
    for (std::size_t i = 0; i < dual.u.size(); ++i) t.add("u", i, dual.u[i]);
    for (std::size_t j = 0; j < dual.w.size(); ++j) t.add("w", j, dual.w[j]);
    return t.str();
}

json potential_json(const MaxAffinePotential& psi) {
    json slopes = json::array();
    for (const auto& s : psi.slopes()) slopes.push_back(hvec_json(s));
    return json{{"slopes", slopes}, {"intercepts", psi.intercepts()}, {"constant", psi.constant()}};
}

json certificate_json(const MonotonicityCertificate& cert) {
    json j{{"mode", cert.mode == CertificationMode::Exhaustive ? "exhaustive" : "sampled"},
           {"max_violation", cert.max_violation},
           {"cycles_checked", cert.cycles_checked},
           {"passed", cert.passed()}};
    j["witness"] = cert.witness ? json(*cert.witness) : json(nullptr);
    return j;
}

std::string rank_csv(const RankMap& rank) {
    CsvTable t{{"index", "reference_atom", "x", "rank"}, {}};
    for (std::size_t k = 0; k < rank.data_points.size(); ++k) {
        t.add(k, rank.assignment[k], join_coords(rank.data_points[k]), join_coords(rank.ranks[k]));
    }
    return t.str();
}

}  // namespace monotone::io
