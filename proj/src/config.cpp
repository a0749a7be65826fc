#include "conesupport/config.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace conesupport {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers can be reported.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json* get(const std::string& key) {
        seen_.insert(key);
        return has(key) ? &j_.at(key) : nullptr;
    }

    double number(const std::string& key, double fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number()) throw ConfigError(child(key), "expected a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) throw ConfigError(child(key), "must be finite");
        return d;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(child(key), "expected an integer");
        return v->get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number_unsigned()) throw ConfigError(child(key), "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(child(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(child(key), "expected a string");
        return v->get<std::string>();
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        return parse_vec3(*v, child(key));
    }

    static Vec3 parse_vec3(const json& v, const std::string& path) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected an array of three numbers");
        Vec3 out{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
            out[i] = v[i].get<double>();
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) throw ConfigError(child(key), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::size_t positive_size(Reader& r, const std::string& key, std::size_t fallback) {
    const auto v = r.integer(key, static_cast<std::int64_t>(fallback));
    if (v <= 0) throw ConfigError(r.child(key), "must be positive");
    return static_cast<std::size_t>(v);
}

TimeGrid parse_grid(const json* j, const std::string& path, const TimeGrid& fallback) {
    if (!j) return fallback;
    Reader r(*j, path);
    TimeGrid g;
    g.count = positive_size(r, "count", fallback.count);
    g.t_min = r.number("t_min", fallback.t_min);
    g.t_max = r.number("t_max", fallback.t_max);
    r.finish();
    if (g.count < 2) throw ConfigError(path + ".count", "needs at least two samples");
    if (!(g.t_max > g.t_min)) throw ConfigError(path + ".t_max", "must exceed t_min");
    return g;
}

Source parse_source(const json& j, const std::string& path) {
    Reader r(j, path);
    const std::string type = r.string("type", "");
    if (type == "gaussian") {
        GaussianPointSource s;
        s.position = r.vec3("position", s.position);
        s.shift = r.number("shift", s.shift);
        s.rate = r.number("rate", s.rate);
        s.half_width = r.number("half_width", s.half_width);
        s.amplitude = r.number("amplitude", s.amplitude);
        r.finish();
        if (!(s.rate > 0.0)) throw ConfigError(path + ".rate", "must be positive");
        if (!(s.half_width > 0.0)) throw ConfigError(path + ".half_width", "must be positive");
        return s;
    }
    if (type == "moving") {
        MovingPointSource s;
        if (const json* t = r.get("trajectory")) {
            Reader tr(*t, path + ".trajectory");
            s.trajectory.center = tr.vec3("center", s.trajectory.center);
            s.trajectory.radius = tr.number("radius", s.trajectory.radius);
            s.trajectory.period = tr.number("period", s.trajectory.period);
            tr.finish();
            if (!(s.trajectory.period > 0.0)) throw ConfigError(path + ".trajectory.period", "must be positive");
        }
        if (const json* w = r.get("window")) {
            if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() || !(*w)[1].is_number())
                throw ConfigError(path + ".window", "expected [start, end]");
            s.window_start = (*w)[0].get<double>();
            s.window_end = (*w)[1].get<double>();
            if (!(s.window_end > s.window_start)) throw ConfigError(path + ".window", "end must exceed start");
        }
        s.rate = r.number("rate", s.rate);
        s.profile_center = r.number("profile_center", s.profile_center);
        s.amplitude = r.number("amplitude", s.amplitude);
        s.retarded_jacobian = r.boolean("retarded_jacobian", s.retarded_jacobian);
        r.finish();
        if (!(s.rate > 0.0)) throw ConfigError(path + ".rate", "must be positive");
        return s;
    }
    throw ConfigError(path + ".type", "expected \"gaussian\" or \"moving\"");
}

json serialize_source(const Source& src) {
    if (const auto* g = std::get_if<GaussianPointSource>(&src))
        return {{"type", "gaussian"}, {"position", to_json(g->position)}, {"shift", g->shift},
                {"rate", g->rate},    {"half_width", g->half_width},    {"amplitude", g->amplitude}};
    const auto& m = std::get<MovingPointSource>(src);
    return {{"type", "moving"},
            {"trajectory",
             {{"center", to_json(m.trajectory.center)}, {"radius", m.trajectory.radius}, {"period", m.trajectory.period}}},
            {"window", json::array({m.window_start, m.window_end})},
            {"rate", m.rate},
            {"profile_center", m.profile_center},
            {"amplitude", m.amplitude},
            {"retarded_jacobian", m.retarded_jacobian}};
}

NearfieldConfig parse_nearfield(const json& j, const std::string& path) {
    Reader r(j, path);
    NearfieldConfig nf;
    if (const json* b = r.get("boundary")) {
        const std::string bp = path + ".boundary";
        Reader br(*b, bp);
        const json* sphere = br.get("sphere");
        const json* points = br.get("points");
        br.finish();
        if ((sphere != nullptr) == (points != nullptr)) throw ConfigError(bp, "give exactly one of sphere or points");
        if (sphere) {
            Reader sr(*sphere, bp + ".sphere");
            nf.boundary.use_sphere = true;
            nf.boundary.center = sr.vec3("center", nf.boundary.center);
            nf.boundary.radius = sr.number("radius", nf.boundary.radius);
            nf.boundary.count = static_cast<int>(positive_size(sr, "count", nf.boundary.count));
            sr.finish();
            if (!(nf.boundary.radius > 0.0)) throw ConfigError(bp + ".sphere.radius", "must be positive");
        } else {
            if (!points->is_array() || points->empty()) throw ConfigError(bp + ".points", "expected a non-empty array");
            nf.boundary.use_sphere = false;
            for (std::size_t i = 0; i < points->size(); ++i)
                nf.boundary.points.push_back(Reader::parse_vec3((*points)[i], bp + ".points[" + std::to_string(i) + "]"));
        }
    }
    nf.trace_times = parse_grid(r.get("trace_times"), path + ".trace_times", nf.trace_times);
    if (const json* l = r.get("lattice")) {
        const std::string lp = path + ".lattice";
        Reader lr(*l, lp);
        nf.mask_grid.lo = lr.vec3("min", nf.mask_grid.lo);
        nf.mask_grid.hi = lr.vec3("max", nf.mask_grid.hi);
        if (const json* n = lr.get("n")) {
            if (!n->is_array() || n->size() != 3) throw ConfigError(lp + ".n", "expected three counts");
            for (std::size_t i = 0; i < 3; ++i) {
                if (!(*n)[i].is_number_integer() || (*n)[i].get<std::int64_t>() <= 0)
                    throw ConfigError(lp + ".n[" + std::to_string(i) + "]", "expected a positive integer");
                nf.mask_grid.n[i] = (*n)[i].get<std::size_t>();
            }
        }
        lr.finish();
        for (std::size_t i = 0; i < 3; ++i)
            if (nf.mask_grid.n[i] > 1 && !(nf.mask_grid.hi[i] > nf.mask_grid.lo[i]))
                throw ConfigError(lp + ".max", "must exceed min in every coordinate");
    }
    nf.mask_grid.times = parse_grid(r.get("mask_times"), path + ".mask_times", nf.mask_grid.times);
    nf.tol = r.number("tol", nf.tol);
    r.finish();
    return nf;
}

json serialize_nearfield(const NearfieldConfig& nf) {
    json boundary;
    if (nf.boundary.use_sphere) {
        boundary["sphere"] = {{"center", to_json(nf.boundary.center)},
                              {"radius", nf.boundary.radius},
                              {"count", nf.boundary.count}};
    } else {
        json pts = json::array();
        for (const auto& p : nf.boundary.points) pts.push_back(to_json(p));
        boundary["points"] = pts;
    }
    return {{"boundary", boundary},
            {"trace_times", to_json(nf.trace_times)},
            {"lattice",
             {{"min", to_json(nf.mask_grid.lo)},
              {"max", to_json(nf.mask_grid.hi)},
              {"n", json::array({nf.mask_grid.n[0], nf.mask_grid.n[1], nf.mask_grid.n[2]})}}},
            {"mask_times", to_json(nf.mask_grid.times)},
            {"tol", nf.tol}};
}

}  // namespace

std::vector<Vec3> BoundarySpec::resolve() const {
    if (!use_sphere) return points;
    std::vector<Vec3> out;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = count == 1 ? 0.0 : 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        out.push_back(center + radius * Vec3{r * std::cos(phi), r * std::sin(phi), z});
    }
    return out;
}

double ExperimentConfig::tolerance_for_diagnostics() const {
    if (diagnostics && diagnostics->rel_tol) return *diagnostics->rel_tol;
    return noise.relative_level > 0.0 ? 5e-2 : 1e-3;
}

ExperimentConfig parse_config(const json& j) {
    Reader r(j, "");
    ExperimentConfig cfg;
    cfg.c0 = r.number("c0", cfg.c0);
    if (!(cfg.c0 > 0.0)) throw ConfigError("c0", "must be positive");
    cfg.times = parse_grid(r.get("time_grid"), "time_grid", cfg.times);
    if (const json* m = r.get("mesh")) {
        Reader mr(*m, "mesh");
        cfg.n_lat = static_cast<int>(mr.integer("n_lat", cfg.n_lat));
        cfg.n_lon = static_cast<int>(mr.integer("n_lon", cfg.n_lon));
        mr.finish();
        if (cfg.n_lat < 2) throw ConfigError("mesh.n_lat", "must be at least 2");
        if (cfg.n_lon < 3) throw ConfigError("mesh.n_lon", "must be at least 3");
    }
    if (const json* s = r.get("sources")) {
        if (!s->is_array()) throw ConfigError("sources", "expected an array");
        for (std::size_t i = 0; i < s->size(); ++i)
            cfg.sources.push_back(parse_source((*s)[i], "sources[" + std::to_string(i) + "]"));
    }
    if (const json* n = r.get("noise")) {
        Reader nr(*n, "noise");
        cfg.noise.relative_level = nr.number("level", cfg.noise.relative_level);
        cfg.noise.seed = nr.unsigned_integer("seed", cfg.noise.seed);
        nr.finish();
        if (cfg.noise.relative_level < 0.0) throw ConfigError("noise.level", "must be non-negative");
    }
    if (const json* s = r.get("separation")) {
        Reader sr(*s, "separation");
        const auto lead = sr.integer("n_lead", static_cast<std::int64_t>(cfg.n_lead));
        if (lead < 0) throw ConfigError("separation.n_lead", "must be non-negative");
        cfg.n_lead = static_cast<std::size_t>(lead);
        cfg.factor = sr.number("factor", cfg.factor);
        cfg.max_gap = sr.number("max_gap", cfg.max_gap);
        cfg.min_component = positive_size(sr, "min_component", cfg.min_component);
        sr.finish();
        if (!(cfg.factor > 0.0)) throw ConfigError("separation.factor", "must be positive");
        if (!(cfg.max_gap > 0.0)) throw ConfigError("separation.max_gap", "must be positive");
    }
    if (const json* c = r.get("csa")) {
        Reader cr(*c, "csa");
        cfg.denominator = static_cast<int>(positive_size(cr, "J", cfg.denominator));
        cfg.max_multiple = static_cast<int>(positive_size(cr, "j_max", cfg.max_multiple));
        cfg.strict_width = cr.boolean("strict_width", cfg.strict_width);
        cr.finish();
    }
    if (const json* n = r.get("nearfield")) cfg.nearfield = parse_nearfield(*n, "nearfield");
    if (const json* d = r.get("diagnostics")) {
        Reader dr(*d, "diagnostics");
        DiagnosticsConfig dc;
        dc.ell_max = static_cast<int>(dr.integer("ell_max", dc.ell_max));
        if (dr.has("rel_tol")) dc.rel_tol = dr.number("rel_tol", 0.0);
        else dr.get("rel_tol");
        dr.finish();
        if (dc.ell_max < 0 || dc.ell_max > 12) throw ConfigError("diagnostics.ell_max", "must lie in [0, 12]");
        if (dc.rel_tol && !(*dc.rel_tol > 0.0)) throw ConfigError("diagnostics.rel_tol", "must be positive");
        cfg.diagnostics = dc;
    }
    cfg.output_dir = r.string("output_dir", cfg.output_dir);
    r.finish();
    validate_config(cfg);
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config_text(read_text_file(path)); }

json serialize_config(const ExperimentConfig& cfg) {
    json sources = json::array();
    for (const auto& s : cfg.sources) sources.push_back(serialize_source(s));
    json out = {{"c0", cfg.c0},
                {"time_grid", to_json(cfg.times)},
                {"mesh", {{"n_lat", cfg.n_lat}, {"n_lon", cfg.n_lon}}},
                {"sources", sources},
                {"noise", {{"level", cfg.noise.relative_level}, {"seed", cfg.noise.seed}}},
                {"separation",
                 {{"n_lead", cfg.n_lead},
                  {"factor", cfg.factor},
                  {"max_gap", cfg.max_gap},
                  {"min_component", cfg.min_component}}},
                {"csa", {{"J", cfg.denominator}, {"j_max", cfg.max_multiple}, {"strict_width", cfg.strict_width}}},
                {"output_dir", cfg.output_dir}};
    if (cfg.nearfield) out["nearfield"] = serialize_nearfield(*cfg.nearfield);
    if (cfg.diagnostics) {
        json d = {{"ell_max", cfg.diagnostics->ell_max}};
        d["rel_tol"] = cfg.diagnostics->rel_tol ? json(*cfg.diagnostics->rel_tol) : json(nullptr);
        out["diagnostics"] = d;
    }
    return out;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n_lead > cfg.times.count) throw ConfigError("separation.n_lead", "exceeds the time sample count");
    if (cfg.max_gap < cfg.times.step()) throw ConfigError("separation.max_gap", "is smaller than the time step");
    for (std::size_t i = 0; i < cfg.sources.size(); ++i) {
        if (const auto* m = std::get_if<MovingPointSource>(&cfg.sources[i])) {
            if (!(m->max_speed() < cfg.c0))
                throw ConfigError("sources[" + std::to_string(i) + "].trajectory", "moves faster than c0");
        }
    }
    if (cfg.nearfield) {
        const auto pts = cfg.nearfield->boundary.resolve();
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (pts[i] == pts[j]) throw ConfigError("nearfield.boundary", "duplicate boundary points");
        if (cfg.max_gap < cfg.nearfield->trace_times.step())
            throw ConfigError("nearfield.trace_times", "step exceeds separation.max_gap");
    }
}

}  // namespace conesupport
