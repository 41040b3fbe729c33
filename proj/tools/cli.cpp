#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "monotone/experiments.hpp"
#include "monotone/io.hpp"
#include "monotone/maps.hpp"
#include "monotone/parallel.hpp"
#include "monotone/ranks.hpp"
#include "monotone/rng.hpp"
#include "monotone/stats.hpp"

namespace monotone::cli {

namespace {

using io::ConfigError;
using io::CsvTable;
using io::json;
using io::Section;
namespace fs = std::filesystem;

struct Context {
    json config;               // effective config (after --seed)
    fs::path config_dir;       // base for relative data paths
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct CommandOutput {
    io::OutputSet files;
    json metadata = json::object();
};

using Command = std::function<CommandOutput(const Context&)>;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json measure_json(const MeasureSpec& spec) {
    json j{{"family", kind_name(spec)}, {"dim", dim(spec)}};
    if (const auto* g = std::get_if<GaussianSpec>(&spec)) j["stds"] = g->stds;
    if (const auto* c = std::get_if<CubeSpec>(&spec)) j["scales"] = c->scales;
    return j;
}

json solver_json(const SemiDiscreteOptions& o) {
    return {{"batch", o.batch}, {"iters", o.iters}, {"step", o.step}, {"step_exponent", o.step_exponent},
            {"tol", o.tol}, {"validation", o.validation}, {"check_every", o.check_every}};
}

std::string coords(const HVec& h) {
    std::string out;
    for (std::size_t k = 0; k < h.dim(); ++k) {
        if (k) out += ' ';
        out += io::format_real(h[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Point sources shared by transport and rank

std::vector<HVec> read_points_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file " + path.string());
    std::vector<HVec> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric cell '" + cell + "' in " + path.string());
            }
        }
        if (!out.empty() && row.size() != out.front().dim()) {
            throw ConfigError("ragged rows in " + path.string());
        }
        out.emplace_back(std::move(row));
    }
    if (out.empty()) throw ConfigError("no points in " + path.string());
    return out;
}

/// Exactly one of `points`, `file` or `measure` (+ `n`).
std::vector<HVec> load_points(const Section& s, const Context& ctx, std::uint64_t seed) {
    const int given = int(s.has("points")) + int(s.has("file")) + int(s.has("measure"));
    if (given != 1) throw ConfigError(s.path_of("points") + ": give exactly one of points, file, measure");
    if (s.has("points")) return io::parse_points(s.raw("points"), s.path_of("points"));
    if (s.has("file")) return read_points_csv(ctx.config_dir / s.text("file"));
    const MeasureSpec spec = io::parse_measure(s.child("measure"));
    const std::size_t n = s.count("n");
    if (n == 0) throw ConfigError(s.path_of("n") + " must be >= 1");
    return sample(spec, n, seed);
}

DiscreteMeasure load_measure(const Section& s, const Context& ctx, std::uint64_t seed) {
    auto points = load_points(s, ctx, seed);
    std::vector<double> weights(points.size(), 1.0);
    if (s.has("weights")) {
        weights = s.reals("weights");
        if (weights.size() != points.size()) throw ConfigError(s.path_of("weights") + " must match the point count");
    } else {
        s.flag("weights", false);
    }
    for (const auto& p : points) {
        if (p.dim() != points.front().dim()) throw ConfigError(s.path_of("points") + ": mixed dimensions");
    }
    try {
        return DiscreteMeasure(std::move(points), std::move(weights));
    } catch (const InvalidInput& e) {
        throw ConfigError(s.path_of("weights") + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Commands

CommandOutput cmd_transport(const Context& ctx) {
    const Section s(ctx.config, "");
    s.count("seed", 0);
    Section src_s = s.child("source");
    Section tgt_s = s.child("target");
    const DiscreteMeasure src = load_measure(src_s, ctx, derive_seed(ctx.seed, 0, 0));
    const DiscreteMeasure tgt = load_measure(tgt_s, ctx, derive_seed(ctx.seed, 0, 1));
    src_s.finish();
    tgt_s.finish();
    if (src.dim() != tgt.dim()) throw ConfigError("source and target dimensions differ");
    TransportOptions topt;
    topt.max_pivots = s.count("max_pivots", 0);
    CertifyOptions copt = s.has("certify") ? io::parse_certify(s.child("certify")) : CertifyOptions{};
    if (!s.has("certify")) s.flag("certify", false);
    copt.seed = derive_seed(ctx.seed, 0, 2);
    s.finish();

    const TransportPlan plan = solve_transport(src, tgt, topt);
    const auto cert = certify_cyclic_monotonicity(plan.coupling, copt);
    const auto psi = potential_from_dual(plan.dual, src, tgt);
    const auto dual_check = check_dual(plan.coupling, plan.dual);

    CommandOutput out;
    out.files.stage("coupling.csv", io::coupling_csv(plan.coupling));
    out.files.stage("dual.csv", io::dual_csv(plan.dual));
    out.files.stage("potential.json", io::potential_json(psi).dump(2) + "\n");
    json certificate = io::certificate_json(cert);
    certificate["cost"] = plan.coupling.cost();
    certificate["marginal_error"] = plan.coupling.marginal_error();
    certificate["dual_infeasibility"] = dual_check.max_infeasibility;
    certificate["complementary_slackness"] = dual_check.max_slackness;
    out.files.stage("certificate.json", certificate.dump(2) + "\n");
    out.metadata = {{"cost", plan.coupling.cost()},
                    {"source_atoms", src.size()},
                    {"target_atoms", tgt.size()},
                    {"dim", src.dim()},
                    {"pivots", plan.pivots},
                    {"certificate_passed", cert.passed()}};
    return out;
}

CommandOutput cmd_rank(const Context& ctx) {
    const Section s(ctx.config, "");
    s.count("seed", 0);
    std::vector<HVec> data;
    json data_meta;
    {
        const Section d = s.child("data");
        if (d.has("curves")) {
            const auto table = read_curve_csv((ctx.config_dir / d.text("curves")).string());
            const std::size_t basis = d.count("basis_size");
            data = project_curves(table, basis);
            data_meta = {{"curves", table.curves.size()}, {"grid_points", table.grid.size()}, {"basis_size", basis}};
        } else {
            data = load_points(d, ctx, derive_seed(ctx.seed, 0, 0));
            data_meta = {{"points", data.size()}};
        }
        d.finish();
    }
    const MeasureSpec ref_spec = io::parse_measure(s.child("reference"));
    const std::string strategy_name = s.text("reference_strategy", "seeded-iid");
    DiscretizationStrategy strategy;
    try {
        strategy = discretization_from_string(strategy_name);
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("reference_strategy: ") + e.what());
    }
    CertifyOptions copt = s.has("certify") ? io::parse_certify(s.child("certify")) : CertifyOptions{};
    if (!s.has("certify")) s.flag("certify", false);
    copt.seed = derive_seed(ctx.seed, 0, 2);
    s.finish();
    if (dim(ref_spec) != data.front().dim()) throw ConfigError("reference dimension differs from the data");

    const auto reference = discretize_reference(ref_spec, data.size(), derive_seed(ctx.seed, 0, 1), strategy);
    const RankMap rank = fit_rank(data, reference);
    const auto cert = certify(rank, copt);

    CommandOutput out;
    out.files.stage("ranks.csv", io::rank_csv(rank));
    out.files.stage("certificate.json", io::certificate_json(cert).dump(2) + "\n");
    out.metadata = {{"dim", data.front().dim()},
                    {"data", data_meta},
                    {"reference", measure_json(ref_spec)},
                    {"reference_strategy", to_string(strategy)},
                    {"reference_bound", reference.bound},
                    {"pushforward_matches", pushforward_matches(rank, reference.measure)},
                    {"certificate_passed", cert.passed()}};
    return out;
}

CommandOutput cmd_local_gc(const Context& ctx) {
    const LocalGcConfig c = io::parse_local_gc(Section(ctx.config, ""));
    const auto r = local_gc_experiment(c, ctx.threads);
    CsvTable t{{"experiment", "n", "seed", "direction_index", "gap", "norm_gap", "points_in_k"}, {}};
    for (const auto& row : r.rows) {
        t.add("local-gc", row.n, row.seed, row.direction_index, row.gap, row.norm_gap, row.points_in_k);
    }
    CommandOutput out;
    out.files.stage("local_gc.csv", t.str());
    out.metadata = {{"dim", dim(c.data)},
                    {"population", r.population_description},
                    {"closed_form", r.closed_form},
                    {"solver", solver_json(c.population.solver)},
                    {"reference_atoms", c.population.reference_atoms},
                    {"strategy", to_string(c.strategy)},
                    {"data", measure_json(c.data)},
                    {"reference", measure_json(c.reference)}};
    return out;
}

CommandOutput cmd_stability(const Context& ctx) {
    const StabilityConfig c = io::parse_stability(Section(ctx.config, ""));
    const auto r = run_stability(c, ctx.threads);
    CsvTable t{{"experiment", "n", "seed", "direction_index", "gap", "norm_gap", "potential_gap", "points_in_k",
                "bound_ok", "missing"},
               {}};
    for (const auto& row : r.rows) {
        t.add("stability", row.n, row.seed, row.direction_index, row.gap, row.norm_gap, row.potential_gap, row.points_in_k,
              row.bound_ok, row.missing);
    }
    json verdicts = json::array();
    for (const auto& v : r.verdicts) {
        verdicts.push_back({{"seed", v.seed}, {"directional", v.directional}, {"norm", v.norm}, {"potential", v.potential}});
    }
    CommandOutput out;
    out.files.stage("stability.csv", t.str());
    out.metadata = {{"dim", dim(c.p)},
                    {"population", r.population_description},
                    {"solver", solver_json(c.population.solver)},
                    {"reference_atoms", c.population.reference_atoms},
                    {"q_strategy", to_string(c.strategy)},
                    {"p_strategy", to_string(c.p_strategy)},
                    {"regularity", "asserted"},
                    {"k_grid_points", r.k_grid_points},
                    {"verdicts", verdicts},
                    {"all_directional", r.all_directional()},
                    {"all_norm", r.all_norm()},
                    {"all_potential", r.all_potential()},
                    {"p", measure_json(c.p)},
                    {"q", measure_json(c.q)}};
    return out;
}

CommandOutput cmd_counterexample_a(const Context& ctx) {
    const auto c = io::parse_counterexample_a(Section(ctx.config, ""));
    const auto r = run_counterexample_a(c);
    CsvTable t{{"n", "fixed_gap", "closed_form_gap", "shift", "image_norm", "gap", "reached"}, {}};
    for (const auto& row : r.rows) {
        t.add(row.n, row.fixed_gap, row.closed_form_gap, row.shift, row.image_norm, row.gap, row.reached);
    }
    CommandOutput out;
    out.files.stage("counterexample_a.csv", t.str());
    out.metadata = {{"dim", c.dim},
                    {"max_closed_form_error", r.max_closed_form_error},
                    {"gap_increasing", r.gap_increasing}};
    return out;
}

CommandOutput cmd_counterexample_b(const Context& ctx) {
    const auto c = io::parse_counterexample_b(Section(ctx.config, ""));
    const auto r = run_counterexample_b(c);
    CsvTable t{{"n", "probe", "sub_lo", "sub_hi", "identity_gap", "limit_value", "interior", "printed_lo",
                "printed_hi", "matches_printed"},
               {}};
    for (const auto& row : r.rows) {
        const std::string plo = row.printed ? io::format_real(row.printed->first) : "";
        const std::string phi = row.printed ? io::format_real(row.printed->second) : "";
        t.add(row.n, row.probe, row.sub_lo, row.sub_hi, row.identity_gap, row.limit_value, row.interior, plo, phi,
              row.matches_printed);
    }
    CommandOutput out;
    out.files.stage("counterexample_b.csv", t.str());
    out.metadata = {{"monotone", r.monotone}};
    return out;
}

CommandOutput cmd_clt(const Context& ctx) {
    const CltConfig c = io::parse_clt(Section(ctx.config, ""));
    const auto r = run_clt(c, ctx.threads);
    CsvTable t{{"experiment", "rep", "seed", "cost", "statistic"}, {}};
    for (std::size_t k = 0; k < r.costs.size(); ++k) t.add("clt", k, c.seed + k, r.costs[k], r.statistics[k]);
    CsvTable q{{"atom", "weight", "y"}, {}};
    for (std::size_t j = 0; j < r.q_points.size(); ++j) q.add(j, r.q_weights[j], coords(r.q_points[j]));
    CommandOutput out;
    out.files.stage("clt.csv", t.str());
    out.files.stage("clt_reference.csv", q.str());
    out.metadata = {{"dim", dim(c.p)},
                    {"p", measure_json(c.p)},
                    {"q", measure_json(c.q)},
                    {"solver", solver_json(c.solver)},
                    {"regularity", "asserted"},
                    {"n", c.n},
                    {"reps", c.reps},
                    {"mean_cost", r.mean_cost},
                    {"sigma2_formula", r.sigma2_formula},
                    {"sigma2_formula_se", r.sigma2_formula_se},
                    {"sigma2_empirical", r.sigma2_empirical},
                    {"sigma2_empirical_se", r.sigma2_empirical_se},
                    {"variance_ratio", r.variance_ratio},
                    {"ks_to_normal", r.ks_to_normal},
                    {"degenerate", r.degenerate},
                    {"semidiscrete_mismatch", r.semidiscrete_mismatch}};
    return out;
}

CommandOutput cmd_diagnose_operator(const Context& ctx) {
    const Section s(ctx.config, "");
    s.count("seed", 0);
    const std::size_t d_max = s.count("d_max", 10);
    const std::size_t seeds = s.count("seeds", 10000);
    const std::size_t push_n = s.count("push_samples", 1000);
    const std::size_t push_dim = s.count("push_dim", d_max);
    s.finish();
    if (d_max == 0 || seeds == 0) throw ConfigError("d_max and seeds must be >= 1");
    if (d_max > 60 || push_dim > 60) throw ConfigError("d_max and push_dim must be <= 60");

    const auto rows = null_domain_diagnostic(d_max, seeds, ctx.seed);
    CsvTable raw{{"seed", "d", "S_d"}, {}};
    std::vector<double> sums(d_max + 1, 0.0);
    for (const auto& row : rows) {
        raw.add(row.seed, row.dim, row.partial_sum);
        sums[row.dim] += row.partial_sum;
    }
    CsvTable t{{"d", "mean_S_d", "expectation", "relative_error"}, {}};
    for (std::size_t d = 1; d <= d_max; ++d) {
        const double mean = sums[d] / static_cast<double>(seeds);
        const double expected = null_domain_expectation(d);
        t.add(d, mean, expected, std::abs(mean - expected) / expected);
    }
    const auto push = pathological_push(push_dim, push_n, derive_seed(ctx.seed, 0, 1));
    CommandOutput out;
    out.files.stage("null_domain.csv", raw.str());
    out.files.stage("null_domain_summary.csv", t.str());
    out.metadata = {{"dim", d_max},
                    {"seeds", seeds},
                    {"push_dim", push_dim},
                    {"push_samples", push_n},
                    {"push_max_discrepancy", push.max_discrepancy}};
    return out;
}

const std::map<std::string, std::pair<Command, std::string>>& commands() {
    static const std::map<std::string, std::pair<Command, std::string>> table{
        {"transport", {cmd_transport, "Exact optimal coupling between two discrete measures"}},
        {"rank", {cmd_rank, "Center-outward ranks of points or projected curves"}},
        {"local-gc", {cmd_local_gc, "Local uniform convergence of empirical rank maps"}},
        {"stability", {cmd_stability, "Stability of empirical monotone maps on a compact set"}},
        {"counterexample-a", {cmd_counterexample_a, "Unbounded-support counterexample"}},
        {"counterexample-b", {cmd_counterexample_b, "Boundary counterexample on the real line"}},
        {"clt", {cmd_clt, "Fluctuations of the empirical transport cost"}},
        {"diagnose-operator", {cmd_diagnose_operator, "Null-domain diagnostic of the unbounded diagonal operator"}},
    };
    return table;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, int code,
                  const json& extra = json::object()) {
    json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monotone transport maps laboratory", "monotone"};
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::size_t threads = default_threads();
    app.add_option("--config", config_path, "Config file (YAML or JSON)")->required();
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Seed, overriding the config");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.require_subcommand(1);
    for (const auto& [name, entry] : commands()) app.add_subcommand(name, entry.second)->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what(), kConfigError);
        return kConfigError;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const Command& command = commands().at(name).first;

    try {
        const Stopwatch total;
        io::RunManifest manifest;
        manifest.command = name;
        manifest.started_at = io::utc_timestamp();
        manifest.version = io::version_string();

        Context ctx;
        ctx.config = io::load_config(config_path);
        if (seed) ctx.config["seed"] = *seed;
        if (ctx.config.contains("seed") && !ctx.config["seed"].is_number_unsigned()) {
            throw ConfigError("seed must be a non-negative integer");
        }
        ctx.seed = ctx.config.value("seed", std::uint64_t{0});
        ctx.config_dir = fs::path(config_path).parent_path();
        ctx.threads = threads;
        manifest.seed = ctx.seed;
        manifest.config_hash = io::config_hash(ctx.config);

        const Stopwatch compute;
        CommandOutput result = command(ctx);
        manifest.timings["compute"] = compute.seconds();

        json metadata = result.metadata;
        metadata["command"] = name;
        metadata["seed"] = ctx.seed;
        metadata["config"] = ctx.config;
        metadata["wall_seconds"] = manifest.timings["compute"];
        result.files.stage("metadata.json", metadata.dump(2) + "\n");
        for (const auto& p : result.files.commit(out_dir)) manifest.outputs.push_back(p.string());
        manifest.outputs.push_back((fs::path(out_dir) / "manifest.json").string());
        manifest.timings["total"] = total.seconds();
        io::write_atomic(fs::path(out_dir) / "manifest.json", manifest.to_json().dump(2) + "\n");
        out << "wrote " << manifest.outputs.size() << " files to " << out_dir << "\n";
        return kOk;
    } catch (const InvalidInput& e) {
        report_error(err, "config", e.what(), kConfigError);
        return kConfigError;
    } catch (const json::exception& e) {
        report_error(err, "config", e.what(), kConfigError);
        return kConfigError;
    } catch (const SolverError& e) {
        json instance = json::parse(e.instance_dump(), nullptr, false);
        report_error(err, "solver", e.what(), kSolverError, {{"instance", instance}});
        return kSolverError;
    } catch (const ConvergenceError& e) {
        report_error(err, "convergence", e.what(), kSolverError, {{"final_mismatch", e.final_mismatch()}});
        return kSolverError;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what(), kFailure);
        return kFailure;
    }
}

}  // namespace monotone::cli
