#include <yaml-cpp/yaml.h>

#include <openssl/sha.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "monotone/io.hpp"

namespace monotone::io {

namespace {

bool parse_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stoll(s, &used, 10);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    in >> out;
    return in && in.peek() == std::char_traits<char>::eof();
}

json to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Sequence: {
            json arr = json::array();
            for (const auto& item : node) arr.push_back(to_json(item));
            return arr;
        }
        case YAML::NodeType::Map: {
            json obj = json::object();
            for (const auto& kv : node) {
                const std::string key = kv.first.as<std::string>();
                if (obj.contains(key)) throw ConfigError("duplicate config key '" + key + "'");
                obj[key] = to_json(kv.second);
            }
            return obj;
        }
        case YAML::NodeType::Scalar: {
            const std::string& s = node.Scalar();
            if (node.Tag() == "!") return s;  // quoted
            if (s == "null" || s == "~") return nullptr;
            if (s == "true" || s == "True") return true;
            if (s == "false" || s == "False") return false;
            std::int64_t i = 0;
            if (parse_int(s, i)) return i >= 0 ? json(static_cast<std::uint64_t>(i)) : json(i);
            double d = 0.0;
            if (parse_real(s, d)) return d;
            return s;
        }
    }
    return nullptr;
}

}  // namespace

json parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    json j = to_json(root);
    if (j.is_null()) j = json::object();
    if (!j.is_object()) throw ConfigError("config root must be a mapping");
    return j;
}

json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 15]);
    }
    return out;
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

// ---------------------------------------------------------------------------

Section::Section(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
    if (!node.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + " must be a mapping");
}

bool Section::has(const std::string& key) const { return node_->contains(key) && !(*node_)[key].is_null(); }

const json& Section::raw(const std::string& key) const {
    if (!node_->contains(key)) throw ConfigError("missing config key " + path_of(key));
    used_.insert(key);
    return (*node_)[key];
}

Section Section::child(const std::string& key) const { return Section(raw(key), path_of(key)); }

double Section::real(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path_of(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path_of(key) + " must be finite");
    return d;
}

double Section::real(const std::string& key, double fallback) const {
    if (!has(key)) {
        used_.insert(key);
        return fallback;
    }
    return real(key);
}

std::uint64_t Section::count(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError(path_of(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::uint64_t Section::count(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) {
        used_.insert(key);
        return fallback;
    }
    return count(key);
}

bool Section::flag(const std::string& key, bool fallback) const {
    if (!has(key)) {
        used_.insert(key);
        return fallback;
    }
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path_of(key) + " must be true or false");
    return v.get<bool>();
}

std::string Section::text(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path_of(key) + " must be a string");
    return v.get<std::string>();
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) {
        used_.insert(key);
        return fallback;
    }
    return text(key);
}

std::vector<double> Section::reals(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path_of(key) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(path_of(key) + " must be a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::size_t> Section::counts(const std::string& key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path_of(key) + " must be a list of integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) {
        if (!e.is_number_unsigned()) throw ConfigError(path_of(key) + " must be a list of non-negative integers");
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

void Section::finish() const {
    for (const auto& [key, value] : node_->items()) {
        if (!used_.count(key)) throw ConfigError("unknown config key " + path_of(key));
    }
}

// ---------------------------------------------------------------------------

namespace {

Spectrum parse_spectrum(const Section& s) {
    const std::string kind = s.text("kind");
    Spectrum out;
    if (kind == "explicit") {
        out = Spectrum::explicit_values(s.reals("values"));
    } else if (kind == "constant") {
        out = Spectrum::constant(s.real("scale", 1.0));
    } else if (kind == "geometric") {
        out = Spectrum::geometric(s.real("scale", 1.0), s.real("rate"));
    } else if (kind == "power") {
        out = Spectrum::power(s.real("scale", 1.0), s.real("exponent"));
    } else {
        throw ConfigError(s.path_of("kind") + ": unknown spectrum '" + kind + "'");
    }
    s.finish();
    return out;
}

std::vector<double> scales_from(const Section& s, const std::string& list_key, std::size_t& d) {
    if (s.has(list_key)) {
        auto v = s.reals(list_key);
        if (s.has("dim") && s.count("dim") != v.size()) throw ConfigError(s.path_of("dim") + " disagrees with " + list_key);
        s.count("dim", 0);
        d = v.size();
        return v;
    }
    d = s.count("dim");
    if (s.has("spectrum")) return parse_spectrum(s.child("spectrum")).generate(d);
    s.raw("spectrum");  // reports the missing key
    return {};
}

}  // namespace

HVec parse_hvec(const json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) throw ConfigError(path + " must be a non-empty list of numbers");
    std::vector<double> v;
    for (const auto& e : node) {
        if (!e.is_number()) throw ConfigError(path + " must be a non-empty list of numbers");
        v.push_back(e.get<double>());
    }
    try {
        return HVec(std::move(v));
    } catch (const InvalidInput& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<HVec> parse_points(const json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) throw ConfigError(path + " must be a non-empty list of points");
    std::vector<HVec> out;
    for (std::size_t k = 0; k < node.size(); ++k) out.push_back(parse_hvec(node[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

MeasureSpec parse_measure(const Section& s) {
    const std::string family = s.text("family");
    MeasureSpec spec;
    if (family == "gaussian") {
        std::size_t d = 0;
        GaussianSpec g;
        if (s.has("spectrum")) {
            d = s.count("dim");
            const Spectrum sp = parse_spectrum(s.child("spectrum"));
            g = GaussianSpec::centered(d, sp);
        } else {
            g = GaussianSpec::centered(scales_from(s, "stds", d));
        }
        if (s.has("mean")) g.mean = parse_hvec(s.raw("mean"), s.path_of("mean"));
        else s.flag("mean", false);
        spec = g;
    } else if (family == "cube") {
        std::size_t d = 0;
        CubeSpec c;
        if (s.has("radius")) {
            // Centered cube with the given shape and corners on the sphere.
            const double radius = s.real("radius");
            std::vector<double> shape = s.has("scales") || s.has("spectrum") ? scales_from(s, "scales", d)
                                                                              : std::vector<double>(s.count("dim"), 1.0);
            c = CubeSpec::scaled_to_radius(std::move(shape), radius);
        } else {
            c = CubeSpec::centered(scales_from(s, "scales", d));
        }
        if (s.has("shift")) c.shift = parse_hvec(s.raw("shift"), s.path_of("shift"));
        else s.flag("shift", false);
        spec = c;
    } else if (family == "spherical_uniform") {
        spec = SphericalUniformSpec::isotropic(s.count("dim"));
    } else {
        throw ConfigError(s.path_of("family") + ": unknown measure family '" + family + "'");
    }
    try {
        validate(spec);
    } catch (const InvalidInput& e) {
        throw ConfigError(s.path_of("family") + ": " + e.what());
    }
    s.finish();
    return spec;
}

CompactSet parse_compact_set(const Section& s) {
    CompactSet k;
    k.radius = s.real("radius", std::numeric_limits<double>::infinity());
    if (s.has("box")) k.box_half_widths = s.reals("box");
    else s.flag("box", false);
    if (!(k.radius > 0.0)) throw ConfigError(s.path_of("radius") + " must be positive");
    s.finish();
    return k;
}

SemiDiscreteOptions parse_semidiscrete(const Section& s) {
    SemiDiscreteOptions o;
    o.batch = s.count("batch", o.batch);
    o.iters = s.count("iters", o.iters);
    o.step = s.real("step", o.step);
    o.step_exponent = s.real("step_exponent", o.step_exponent);
    o.tol = s.real("tol", o.tol);
    o.validation = s.count("validation", o.validation);
    o.check_every = s.count("check_every", o.check_every);
    if (s.has("anchor")) o.anchor = parse_hvec(s.raw("anchor"), s.path_of("anchor"));
    else s.flag("anchor", false);
    if (o.validation < 100000) throw ConfigError(s.path_of("validation") + " must be at least 100000");
    s.finish();
    return o;
}

PopulationOptions parse_population(const Section& s) {
    PopulationOptions o;
    o.reference_atoms = s.count("reference_atoms", o.reference_atoms);
    if (s.has("solver")) o.solver = parse_semidiscrete(s.child("solver"));
    else s.flag("solver", false);
    s.finish();
    return o;
}

CertifyOptions parse_certify(const Section& s) {
    CertifyOptions o;
    o.max_cycle_len = s.count("max_cycle_len", o.max_cycle_len);
    o.samples = s.count("samples", o.samples);
    o.budget = s.count("budget", o.budget);
    o.tolerance = s.real("tolerance", o.tolerance);
    s.finish();
    return o;
}

namespace {

DiscretizationStrategy parse_strategy(const Section& s, const std::string& key) {
    const std::string name = s.text(key, "seeded-iid");
    try {
        return discretization_from_string(name);
    } catch (const InvalidInput& e) {
        throw ConfigError(s.path_of(key) + ": " + e.what());
    }
}

std::vector<HVec> parse_directions(const Section& s, std::size_t d) {
    auto dirs = parse_points(s.raw("directions"), s.path_of("directions"));
    for (const auto& h : dirs) {
        if (h.dim() != d) throw ConfigError(s.path_of("directions") + ": direction of the wrong dimension");
    }
    return dirs;
}

std::vector<std::size_t> parse_n_grid(const Section& s) {
    auto grid = s.counts("n_grid");
    if (grid.empty()) throw ConfigError(s.path_of("n_grid") + " must not be empty");
    for (auto n : grid) {
        if (n == 0) throw ConfigError(s.path_of("n_grid") + " entries must be >= 1");
    }
    return grid;
}

// Support regularity cannot be checked numerically; configs may only assert it.
void check_regularity(const Section& s) {
    if (s.text("regularity", "asserted") != "asserted") {
        throw ConfigError(s.path_of("regularity") + " must be 'asserted'");
    }
}

}  // namespace

StabilityConfig parse_stability(const Section& s) {
    StabilityConfig c{parse_measure(s.child("p")), parse_measure(s.child("q"))};
    c.n_grid = parse_n_grid(s);
    c.reps = s.count("reps", c.reps);
    c.k_set = parse_compact_set(s.child("k"));
    c.directions = parse_directions(s, dim(c.p));
    c.seed = s.count("seed", 0);
    c.bound = s.real("bound", c.bound);
    c.strategy = parse_strategy(s, "q_strategy");
    c.p_strategy = parse_strategy(s, "p_strategy");
    c.potential_grid = s.count("potential_grid", c.potential_grid);
    if (s.has("population")) c.population = parse_population(s.child("population"));
    else s.flag("population", false);
    check_regularity(s);
    s.finish();
    return c;
}

LocalGcConfig parse_local_gc(const Section& s) {
    LocalGcConfig c{parse_measure(s.child("data")), parse_measure(s.child("reference"))};
    c.n_grid = parse_n_grid(s);
    c.reps = s.count("reps", 1);
    c.k_set = parse_compact_set(s.child("k"));
    c.directions = parse_directions(s, dim(c.data));
    c.seed = s.count("seed", 0);
    c.strategy = parse_strategy(s, "strategy");
    if (s.has("population")) c.population = parse_population(s.child("population"));
    else s.flag("population", false);
    s.finish();
    return c;
}

CltConfig parse_clt(const Section& s) {
    CltConfig c{parse_measure(s.child("p")), parse_measure(s.child("q"))};
    c.q_atoms = s.count("q_atoms", c.q_atoms);
    c.n = s.count("n", c.n);
    c.reps = s.count("reps", c.reps);
    c.seed = s.count("seed", 0);
    c.mc_n = s.count("mc_n", c.mc_n);
    c.bootstrap = s.count("bootstrap", c.bootstrap);
    if (s.has("solver")) c.solver = parse_semidiscrete(s.child("solver"));
    else s.flag("solver", false);
    check_regularity(s);
    if (c.reps < 2) throw ConfigError(s.path_of("reps") + " must be at least 2");
    if (c.mc_n < 2) throw ConfigError(s.path_of("mc_n") + " must be at least 2");
    s.finish();
    return c;
}

CounterexampleAConfig parse_counterexample_a(const Section& s) {
    CounterexampleAConfig c;
    c.dim = s.count("dim", c.dim);
    if (s.has("n_grid")) c.n_grid = parse_n_grid(s);
    else s.flag("n_grid", false);
    if (s.has("x")) c.x = parse_hvec(s.raw("x"), s.path_of("x"));
    else s.flag("x", false);
    s.count("seed", 0);
    s.finish();
    return c;
}

CounterexampleBConfig parse_counterexample_b(const Section& s) {
    CounterexampleBConfig c;
    if (s.has("n_grid")) c.n_grid = parse_n_grid(s);
    else s.flag("n_grid", false);
    if (s.has("probes")) c.probes = s.reals("probes");
    else s.flag("probes", false);
    c.monotone_grid = s.count("monotone_grid", c.monotone_grid);
    s.count("seed", 0);
    s.finish();
    return c;
}

}  // namespace monotone::io
