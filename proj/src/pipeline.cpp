#include "conesupport/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "conesupport/io.hpp"
#include "conesupport/sphere_mesh.hpp"

namespace conesupport {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw InputError("cannot create output directory " + out.string());
}

template <class F>
void write_csv(const fs::path& path, F&& writer) {
    std::ostringstream ss;
    writer(ss);
    write_text_file(path, ss.str());
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

SphereMesh config_mesh(const ExperimentConfig& cfg) { return build_mesh(cfg.n_lat, cfg.n_lon); }

json describe_run(const ExperimentConfig& cfg) {
    const auto full = serialize_config(cfg);
    return {{"c0", cfg.c0}, {"time_grid", full["time_grid"]}, {"mesh", full["mesh"]}, {"sources", full["sources"]}};
}

}  // namespace

SimulationOutput simulate(const ExperimentConfig& cfg) {
    validate_config(cfg);
    SimulationOutput out;
    out.clean = sample_farfield_matrix(cfg.sources, config_mesh(cfg), cfg.times, cfg.c0);
    const bool zero = std::all_of(out.clean.values.begin(), out.clean.values.end(), [](double v) { return v == 0.0; });
    if (zero && cfg.noise.relative_level > 0.0) {
        out.noisy.matrix = out.clean;
        out.noise_skipped = true;
    } else {
        out.noisy = add_relative_noise(out.clean, cfg.noise);
    }
    return out;
}

NearFieldTrace simulate_trace(const ExperimentConfig& cfg) {
    if (!cfg.nearfield) throw ConfigError("nearfield", "block is required for near-field data");
    std::vector<GaussianPointSource> gauss;
    for (std::size_t i = 0; i < cfg.sources.size(); ++i) {
        const auto* g = std::get_if<GaussianPointSource>(&cfg.sources[i]);
        if (!g) throw ConfigError("sources[" + std::to_string(i) + "]", "near-field traces support gaussian sources only");
        gauss.push_back(*g);
    }
    const auto points = cfg.nearfield->boundary.resolve();
    for (const auto& g : gauss)
        for (std::size_t i = 0; i < points.size(); ++i)
            if (distance(g.position, points[i]) == 0.0)
                throw ConfigError("nearfield.boundary", "boundary point coincides with a source");
    return sample_nearfield_trace(gauss, points, cfg.nearfield->trace_times, cfg.c0);
}

CsaParams csa_params(const ExperimentConfig& cfg) {
    CsaParams p;
    p.c0 = cfg.c0;
    p.denominator = cfg.denominator;
    p.max_multiple = cfg.max_multiple;
    p.strict_width = cfg.strict_width;
    p.separation.n_lead = cfg.n_lead;
    p.separation.factor = cfg.factor;
    p.separation.max_gap = cfg.max_gap;
    p.separation.min_component = cfg.min_component;
    return p;
}

TimedCsa timed_csa(const FarFieldMatrix& g, const CsaParams& params) {
    const auto start = std::chrono::steady_clock::now();
    TimedCsa out;
    out.result = run_csa(g, params);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

json csa_report(const TimedCsa& run, const CsaParams& params) {
    json cones = json::array();
    for (std::size_t i = 0; i < run.result.estimates.size(); ++i) {
        auto c = to_json(run.result.estimates[i]);
        c["samples"] = run.result.separation.components[i].members.size();
        c["directions"] = run.result.supports[i].entries.size();
        cones.push_back(c);
    }
    json wscc = json::array();
    for (bool b : run.result.wscc) wscc.push_back(b);
    return {{"components", run.result.estimates.size()},
            {"cones", cones},
            {"wscc", wscc},
            {"strict_width", params.strict_width},
            {"c0", params.c0},
            {"seconds", run.seconds}};
}

FarFieldMatrix component_matrix(const FarFieldMatrix& g, const SupportComponent& comp) {
    FarFieldMatrix out(g.times, g.mesh);
    for (const auto& [m, k] : comp.members) out.at(m, k) = g.at(m, k);
    return out;
}

NearfieldOutcome nearfield_masks(const NearFieldTrace& trace, const ExperimentConfig& cfg, bool oracle) {
    if (!cfg.nearfield) throw ConfigError("nearfield", "block is required for near-field masks");
    const auto& nf = *cfg.nearfield;
    NearfieldOutcome out;
    const auto thr = estimate_trace_thresholds(trace, std::min(cfg.n_lead, trace.cols()), cfg.factor);
    out.sets = time_support_sets(trace, thr, cfg.max_gap);
    for (std::size_t i = 0; i < out.sets.intervals.size(); ++i)
        if (out.sets.intervals[i].empty()) out.silent_points.push_back(i);
    out.tol = nf.tol >= 0.0 ? nf.tol : 0.6 * nf.mask_grid.times.step();
    out.minus = pi_minus(out.sets, nf.mask_grid, cfg.c0, out.tol);
    if (oracle) {
        out.plus = pi_plus_bruteforce(out.sets, nf.mask_grid, cfg.c0, out.tol);
        for (std::size_t i = 0; i < out.minus.flags.size(); ++i)
            if (out.minus.flags[i] != out.plus->flags[i]) ++out.disagreements;
    }
    return out;
}

ConicalSet parse_cone_spec(const std::string& spec) {
    std::vector<double> v;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            while (used < item.size() && item[used] == ' ') ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("cone spec: not a number: '" + item + "'");
        }
    }
    if (v.size() != 5) throw InputError("cone spec must be R,tau,z1,z2,z3");
    if (!(v[0] >= 0.0)) throw InputError("cone spec: radius must be non-negative");
    return {v[0], v[1], {v[2], v[3], v[4]}};
}

json cmd_simulate(const ExperimentConfig& cfg, const fs::path& out) {
    ensure_dir(out);
    const auto sim = simulate(cfg);
    write_csv(out / "mesh.csv", [&](std::ostream& os) { write_mesh_csv(os, sim.clean.mesh); });
    write_csv(out / "clean.csv", [&](std::ostream& os) { write_matrix_csv(os, sim.clean); });
    write_csv(out / "noisy.csv", [&](std::ostream& os) { write_matrix_csv(os, sim.noisy.matrix); });

    json sidecar = describe_run(cfg);
    sidecar["noise"] = noise_sidecar(sim.noisy, cfg.noise);
    sidecar["noise"]["skipped"] = sim.noise_skipped;
    write_json(out / "noisy.json", sidecar);

    json summary = {{"rows", sim.clean.rows()},
                    {"cols", sim.clean.cols()},
                    {"achieved_ratio", sim.noisy.achieved_ratio},
                    {"files", json::array({"mesh.csv", "clean.csv", "noisy.csv", "noisy.json"})},
                    {"warnings", json::array()}};
    if (sim.noise_skipped) summary["warnings"].push_back("far field is identically zero; noise not injected");
    if (cfg.nearfield) {
        const auto trace = simulate_trace(cfg);
        write_csv(out / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, trace); });
        summary["files"].push_back("trace.csv");
    }
    return summary;
}

json cmd_separate(const fs::path& matrix, const ExperimentConfig& cfg, const fs::path& out) {
    const auto g = load_matrix(matrix, config_mesh(cfg));
    ensure_dir(out);
    const auto sep = separate(g, csa_params(cfg).separation);
    write_csv(out / "components.csv", [&](std::ostream& os) { write_component_mask_csv(os, sep); });
    json comps = json::array();
    for (const auto& c : sep.components)
        comps.push_back({{"samples", c.members.size()},
                         {"directions", c.per_direction_intervals.size()},
                         {"first_time", g.times.at(c.first_time_index())}});
    json report = {{"components", comps}, {"threshold_floor", sep.thresholds.floor}};
    write_json(out / "separation.json", report);
    return report;
}

json cmd_csa(const fs::path& matrix, const ExperimentConfig& cfg, const fs::path& out) {
    const auto g = load_matrix(matrix, config_mesh(cfg));
    ensure_dir(out);
    const auto params = csa_params(cfg);
    const auto run = timed_csa(g, params);
    write_csv(out / "components.csv", [&](std::ostream& os) { write_component_mask_csv(os, run.result.separation); });
    auto report = csa_report(run, params);
    write_json(out / "csa_report.json", report);
    return report;
}

json cmd_nearfield(const fs::path& trace_path, const ExperimentConfig& cfg, const fs::path& out, bool oracle) {
    if (!cfg.nearfield) throw ConfigError("nearfield", "block is required for the nearfield command");
    const auto trace = trace_path.empty() ? simulate_trace(cfg) : load_trace(trace_path);
    ensure_dir(out);
    const auto res = nearfield_masks(trace, cfg, oracle);
    write_csv(out / "pi_minus.csv", [&](std::ostream& os) { write_support_mask_csv(os, res.minus); });
    if (res.plus) write_csv(out / "pi_plus.csv", [&](std::ostream& os) { write_support_mask_csv(os, *res.plus); });

    json report = {{"nodes", res.minus.flags.size()}, {"marked", res.minus.count()}, {"tol", res.tol},
                   {"oracle", oracle},                {"warnings", json::array()}};
    if (oracle) {
        report["disagreements"] = res.disagreements;
        report["agreement"] = 1.0 - static_cast<double>(res.disagreements) / static_cast<double>(res.minus.flags.size());
    }
    if (!res.silent_points.empty()) {
        report["silent_points"] = res.silent_points;
        report["warnings"].push_back(std::to_string(res.silent_points.size()) +
                                     " boundary point(s) carry no signal; the support mask is empty");
    }
    // Nodes nearest the configured point sources, when they fall inside the lattice.
    json sources = json::array();
    const auto& grid = cfg.nearfield->mask_grid;
    for (const auto& s : cfg.sources) {
        const auto* gs = std::get_if<GaussianPointSource>(&s);
        if (!gs) continue;
        const SpaceTimePoint p{gs->shift, gs->position};
        const auto idx = grid.nearest(p);
        sources.push_back({{"tau", p.t}, {"position", to_json(p.x)}, {"marked", res.minus.flags[idx] == 1}});
    }
    report["sources"] = sources;
    write_json(out / "nearfield.json", report);
    if (res.disagreements > 0)
        throw InvariantViolation("forward and backward cone masks disagree on " + std::to_string(res.disagreements) +
                                 " nodes");
    return report;
}

json cmd_diagnose(const fs::path& matrix, const ConicalSet& cone, const ExperimentConfig& cfg, const fs::path& out) {
    const auto g = load_matrix(matrix, config_mesh(cfg));
    ensure_dir(out);
    FriedlanderOptions opts;
    opts.n_lead = cfg.n_lead;
    opts.factor = cfg.factor;
    opts.rel_tol = cfg.tolerance_for_diagnostics();
    if (cfg.diagnostics) opts.ell_max = cfg.diagnostics->ell_max;
    const auto rep = friedlander_report(g, cone.radius, cone.center_time, cone.center_space, cfg.c0, opts);
    auto j = to_json(rep);
    write_json(out / "friedlander.json", j);
    return j;
}

json cmd_run_all(const ExperimentConfig& cfg, const fs::path& out, bool oracle) {
    json summary;
    summary["simulate"] = cmd_simulate(cfg, out);
    const auto mesh = config_mesh(cfg);
    const auto g = load_matrix(out / "noisy.csv", mesh);
    const auto params = csa_params(cfg);
    const auto run = timed_csa(g, params);
    write_csv(out / "components.csv", [&](std::ostream& os) { write_component_mask_csv(os, run.result.separation); });
    auto report = csa_report(run, params);
    write_json(out / "csa_report.json", report);
    // Keep the summary itself reproducible: wall-clock time lives under "timing".
    summary["timing"] = {{"csa_seconds", report["seconds"]}};
    report.erase("seconds");
    summary["csa"] = report;

    FriedlanderOptions opts;
    opts.n_lead = cfg.n_lead;
    opts.factor = cfg.factor;
    opts.rel_tol = cfg.tolerance_for_diagnostics();
    if (cfg.diagnostics) opts.ell_max = cfg.diagnostics->ell_max;
    json diag = json::array();
    for (const auto& est : run.result.estimates) {
        const auto part = component_matrix(g, run.result.separation.components[est.component]);
        const auto& k = est.step2;
        diag.push_back(to_json(friedlander_report(part, k.radius, k.center_time, k.center_space, cfg.c0, opts)));
    }
    write_json(out / "friedlander.json", diag);
    summary["diagnose"] = diag;

    if (cfg.nearfield) summary["nearfield"] = cmd_nearfield(out / "trace.csv", cfg, out, oracle);
    summary["cones"] = report["cones"];
    write_json(out / "summary.json", summary);
    return summary;
}

}  // namespace conesupport
