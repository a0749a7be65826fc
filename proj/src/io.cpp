#include "conesupport/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace conesupport {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& field, std::size_t line_no) {
    std::string s = field;
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t lead = 0;
    while (lead < s.size() && s[lead] == ' ') ++lead;
    double v = 0.0;
    const char* first = s.data() + lead;
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last)
        throw InputError("line " + std::to_string(line_no) + ": not a number: '" + field + "'");
    return v;
}

bool next_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

TimeGrid grid_from_header(const std::vector<double>& times) {
    if (times.size() < 2) throw InputError("time header needs at least two samples");
    TimeGrid grid{times.size(), times.front(), times.back()};
    if (!(grid.t_max > grid.t_min)) throw InputError("time header is not increasing");
    const double tol = 1e-9 * (grid.t_max - grid.t_min);
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - grid.at(k)) > tol) throw InputError("time header is not a uniform grid");
    return grid;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& os, const FarFieldMatrix& g) {
    g.validate();
    os << "time";
    for (std::size_t k = 0; k < g.cols(); ++k) os << ',' << format_double(g.times.at(k));
    os << '\n';
    for (std::size_t m = 0; m < g.rows(); ++m) {
        os << m;
        for (double v : g.row(m)) os << ',' << format_double(v);
        os << '\n';
    }
}

FarFieldMatrix read_matrix_csv(std::istream& is, const SphereMesh& mesh) {
    std::string line;
    if (!next_line(is, line)) throw InputError("matrix file is empty");
    auto head = split(line, ',');
    if (head.empty() || head[0] != "time") throw InputError("matrix file: header must start with 'time'");
    std::vector<double> times;
    for (std::size_t i = 1; i < head.size(); ++i) times.push_back(parse_double(head[i], 1));
    FarFieldMatrix g(grid_from_header(times), mesh);

    std::size_t line_no = 1, m = 0;
    while (next_line(is, line)) {
        ++line_no;
        auto fields = split(line, ',');
        if (fields.size() != times.size() + 1)
            throw InputError("matrix file line " + std::to_string(line_no) + ": expected " +
                             std::to_string(times.size() + 1) + " fields");
        if (m >= mesh.size()) throw InputError("matrix file has more rows than mesh directions");
        if (parse_double(fields[0], line_no) != static_cast<double>(m))
            throw InputError("matrix file line " + std::to_string(line_no) + ": unexpected direction index");
        for (std::size_t k = 0; k < times.size(); ++k) g.at(m, k) = parse_double(fields[k + 1], line_no);
        ++m;
    }
    if (m != mesh.size())
        throw InputError("matrix file has " + std::to_string(m) + " rows, mesh has " + std::to_string(mesh.size()));
    return g;
}

void write_trace_csv(std::ostream& os, const NearFieldTrace& trace) {
    trace.validate();
    os << "x1,x2,x3";
    for (std::size_t k = 0; k < trace.cols(); ++k) os << ',' << format_double(trace.times.at(k));
    os << '\n';
    for (std::size_t i = 0; i < trace.rows(); ++i) {
        const auto& y = trace.points[i];
        os << format_double(y[0]) << ',' << format_double(y[1]) << ',' << format_double(y[2]);
        for (double v : trace.row(i)) os << ',' << format_double(v);
        os << '\n';
    }
}

NearFieldTrace read_trace_csv(std::istream& is) {
    std::string line;
    if (!next_line(is, line)) throw InputError("trace file is empty");
    auto head = split(line, ',');
    if (head.size() < 3 || head[0] != "x1" || head[1] != "x2" || head[2] != "x3")
        throw InputError("trace file: header must start with 'x1,x2,x3'");
    std::vector<double> times;
    for (std::size_t i = 3; i < head.size(); ++i) times.push_back(parse_double(head[i], 1));
    const TimeGrid grid = grid_from_header(times);

    std::vector<Vec3> points;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (next_line(is, line)) {
        ++line_no;
        auto fields = split(line, ',');
        if (fields.size() != times.size() + 3)
            throw InputError("trace file line " + std::to_string(line_no) + ": wrong field count");
        points.push_back({parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                          parse_double(fields[2], line_no)});
        for (std::size_t k = 0; k < times.size(); ++k) values.push_back(parse_double(fields[k + 3], line_no));
    }
    NearFieldTrace trace(grid, std::move(points));
    trace.values = std::move(values);
    try {
        trace.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("trace file: ") + e.what());
    }
    return trace;
}

void write_mesh_csv(std::ostream& os, const SphereMesh& mesh) {
    const auto w = quadrature_weights(mesh);
    os << "index,dx,dy,dz,weight,neighbors\n";
    for (std::size_t m = 0; m < mesh.size(); ++m) {
        const auto& d = mesh.directions[m];
        os << m << ',' << format_double(d[0]) << ',' << format_double(d[1]) << ',' << format_double(d[2]) << ','
           << format_double(w[m]) << ',';
        for (std::size_t i = 0; i < mesh.adjacency[m].size(); ++i) os << (i ? ";" : "") << mesh.adjacency[m][i];
        os << '\n';
    }
}

void write_component_mask_csv(std::ostream& os, const SeparationResult& sep) {
    os << "component,direction,time_index\n";
    for (std::size_t c = 0; c < sep.components.size(); ++c)
        for (const auto& [m, k] : sep.components[c].members) os << c << ',' << m << ',' << k << '\n';
}

void write_support_mask_csv(std::ostream& os, const SupportMask4D& mask) {
    os << "t,x1,x2,x3,flag\n";
    for (std::size_t i = 0; i < mask.flags.size(); ++i) {
        const auto p = mask.grid.node(i);
        os << format_double(p.t) << ',' << format_double(p.x[0]) << ',' << format_double(p.x[1]) << ','
           << format_double(p.x[2]) << ',' << int(mask.flags[i]) << '\n';
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FarFieldMatrix load_matrix(const std::filesystem::path& path, const SphereMesh& mesh) {
    std::istringstream is(read_text_file(path));
    return read_matrix_csv(is, mesh);
}

NearFieldTrace load_trace(const std::filesystem::path& path) {
    std::istringstream is(read_text_file(path));
    return read_trace_csv(is);
}

nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

nlohmann::json to_json(const TimeGrid& grid) {
    return {{"count", grid.count}, {"t_min", grid.t_min}, {"t_max", grid.t_max}};
}

nlohmann::json to_json(const ConicalSet& k) {
    return {{"radius", k.radius}, {"tau", k.center_time}, {"z", to_json(k.center_space)}};
}

nlohmann::json to_json(const ConeEstimate& e) {
    return {{"component", e.component}, {"step1", to_json(e.step1)}, {"step2", to_json(e.step2)},
            {"improved", e.improved},   {"J", e.denominator},        {"j_max", e.max_multiple}};
}

nlohmann::json to_json(const FriedlanderReport& r) {
    nlohmann::json moments = nlohmann::json::array();
    for (const auto& m : r.moments) moments.push_back({{"ell", m.ell}, {"residual", m.residual}, {"pass", m.pass}});
    return {{"cone", {{"radius", r.radius}, {"tau", r.tau_c}, {"z", to_json(r.z_c)}}},
            {"support", {{"pass", r.support.pass},
                         {"max_abs_shift", r.support.max_abs_shift},
                         {"margin", r.support.margin}}},
            {"moments", moments},
            {"moments_pass", r.moments_pass()},
            {"pass", r.pass()}};
}

nlohmann::json noise_sidecar(const NoisyMatrix& noisy, const NoiseSpec& spec) {
    return {{"seed", spec.seed},
            {"level", spec.relative_level},
            {"scale", noisy.scale},
            {"achieved_ratio", noisy.achieved_ratio},
            {"generator", noisy.generator}};
}

}  // namespace conesupport
