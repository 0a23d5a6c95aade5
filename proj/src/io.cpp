#include "bshape/io.hpp"

#include "bshape/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace bshape {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::out | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

void check_written(const std::ostream& out, const std::filesystem::path& path)
{
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

std::string sci(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

std::string shortest(double x)
{
    std::array<char, 40> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

bool parse_double(const std::string& s, double& x)
{
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, x);
    return res.ec == std::errc() && res.ptr == e;
}

bool parse_int(const std::string& s, int& x)
{
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto res = std::from_chars(b, e, x);
    return res.ec == std::errc() && res.ptr == e;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void write_curve(const std::filesystem::path& path, const BoundaryCurve& curve)
{
    auto out = open_out(path);
    out << "# gamma N=" << curve.n_intervals() << '\n';
    for (int i = 0; i <= curve.n_intervals(); ++i) {
        out << sci(curve.node(i)) << ' ' << sci(curve[static_cast<std::size_t>(i)]) << '\n';
    }
    out.flush();
    check_written(out, path);
}

BoundaryCurve read_curve(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# gamma N=", 0) != 0) {
        throw IoError("'" + path.string() + "': missing '# gamma N=<n>' header");
    }
    int n = 0;
    if (!parse_int(trim(line.substr(10)), n) || n < 1) {
        throw IoError("'" + path.string() + "': bad interval count in header");
    }
    std::vector<double> values;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string a, b;
        double xi = 0.0, v = 0.0;
        if (!(ls >> a >> b) || !parse_double(a, xi) || !parse_double(b, v)) {
            throw IoError("'" + path.string() + "': malformed line " + std::to_string(lineno));
        }
        const double expected = static_cast<double>(values.size()) / n;
        if (std::abs(xi - expected) > 1e-12) {
            throw IoError("'" + path.string() + "': abscissa on line " + std::to_string(lineno) +
                          " is not on the uniform grid");
        }
        values.push_back(v);
    }
    if (values.size() != static_cast<std::size_t>(n) + 1) {
        throw IoError("'" + path.string() + "': expected " + std::to_string(n + 1) + " values, found " +
                      std::to_string(values.size()));
    }
    return BoundaryCurve(std::move(values));
}

std::string format_trace_row(const IterationRecord& r)
{
    std::ostringstream s;
    s << r.iter << ',' << sci(r.J1) << ',' << sci(r.curve_energy) << ',' << sci(r.mean_sq) << ','
      << sci(r.obstacle) << ',' << sci(r.total) << ',' << sci(r.phi_inf) << ',' << r.picard_iters << ','
      << sci(r.wallclock_s);
    return s.str();
}

IterationRecord parse_trace_row(const std::string& line)
{
    std::vector<std::string> cols;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) {
        cols.push_back(trim(cell));
    }
    if (cols.size() != 9) {
        throw IoError("trace row has " + std::to_string(cols.size()) + " columns, expected 9");
    }
    IterationRecord r;
    const bool ok = parse_int(cols[0], r.iter) && parse_double(cols[1], r.J1) &&
                    parse_double(cols[2], r.curve_energy) && parse_double(cols[3], r.mean_sq) &&
                    parse_double(cols[4], r.obstacle) && parse_double(cols[5], r.total) &&
                    parse_double(cols[6], r.phi_inf) && parse_int(cols[7], r.picard_iters) &&
                    parse_double(cols[8], r.wallclock_s);
    if (!ok) {
        throw IoError("trace row is not numeric: " + line);
    }
    return r;
}

TraceWriter::TraceWriter(const std::filesystem::path& path, bool zero_wallclock)
    : path_(path), out_(open_out(path)), zero_wallclock_(zero_wallclock)
{
    out_ << trace_header << '\n';
    out_.flush();
    check_written(out_, path_);
}

void TraceWriter::append(const IterationRecord& r)
{
    IterationRecord row = r;
    if (zero_wallclock_) {
        row.wallclock_s = 0.0;
    }
    out_ << format_trace_row(row) << '\n';
    out_.flush();
    check_written(out_, path_);
}

void write_trace(const std::filesystem::path& path, const std::vector<IterationRecord>& records, bool zero_wallclock)
{
    TraceWriter w(path, zero_wallclock);
    for (const auto& r : records) {
        w.append(r);
    }
}

std::vector<IterationRecord> read_trace(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != trace_header) {
        throw IoError("'" + path.string() + "': unexpected trace header");
    }
    std::vector<IterationRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        try {
            out.push_back(parse_trace_row(line));
        } catch (const IoError& e) {
            throw IoError("'" + path.string() + "' line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<int> region_tags(const Mesh& mesh)
{
    std::map<std::pair<int, int>, int> edge_tag;
    for (const auto& e : mesh.boundary_edges) {
        const int a = std::min(e.vertices[0], e.vertices[1]);
        const int b = std::max(e.vertices[0], e.vertices[1]);
        edge_tag[{a, b}] = e.tag == BoundaryTag::Bottom ? 1 : 2;
    }
    std::vector<int> tags(mesh.triangles.size(), 0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = std::min(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)]);
            const int b = std::max(tri[static_cast<std::size_t>(k)], tri[static_cast<std::size_t>((k + 1) % 3)]);
            const auto it = edge_tag.find({a, b});
            if (it != edge_tag.end()) {
                tags[t] = tags[t] == 1 ? 1 : it->second;
            }
        }
    }
    return tags;
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const std::vector<NamedField>& fields)
{
    for (const auto& f : fields) {
        if (f.values.size() != mesh.vertices.size()) {
            throw DomainError("write_vtk: field '" + f.name + "' does not have one value per vertex");
        }
        if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos) {
            throw DomainError("write_vtk: field names must be non-empty and without blanks");
        }
    }
    auto out = open_out(path);
    const std::size_t nv = mesh.vertices.size();
    const std::size_t nt = mesh.triangles.size();
    out << "# vtk DataFile Version 3.0\n";
    out << "bottom-shape optimization fields\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices) {
        out << sci(p.x) << ' ' << sci(p.y) << ' ' << sci(0.0) << '\n';
    }
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& t : mesh.triangles) {
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    out << "CELL_TYPES " << nt << '\n';
    for (std::size_t t = 0; t < nt; ++t) {
        out << "5\n";
    }
    out << "CELL_DATA " << nt << '\n';
    out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (int tag : region_tags(mesh)) {
        out << tag << '\n';
    }
    if (!fields.empty()) {
        out << "POINT_DATA " << nv << '\n';
        for (const auto& f : fields) {
            out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : f.values) {
                out << sci(v) << '\n';
            }
        }
    }
    out.flush();
    check_written(out, path);
}

std::vector<NamedField> solution_fields(const StateSolution& state, const AdjointSolution& adjoint)
{
    return {
        {"v_magnitude", state.v.vertex_magnitude()},
        {"p", state.p.vertex_values()},
        {"T_hat", state.T_hat.vertex_values()},
        {"T", state.T.vertex_values()},
        {"S", adjoint.S.vertex_values()},
        {"w_magnitude", adjoint.w.vertex_magnitude()},
        {"q", adjoint.q.vertex_values()},
    };
}

void write_gradient_csv(const std::filesystem::path& path, const GradientSample& g)
{
    auto out = open_out(path);
    out << "xi,F,DJ,phi\n";
    for (std::size_t i = 0; i < g.xi.size(); ++i) {
        out << sci(g.xi[i]) << ',' << sci(g.F[i]) << ',' << sci(g.DJ[i]) << ',' << sci(g.phi[i]) << '\n';
    }
    out.flush();
    check_written(out, path);
}

// ---- run configuration ----------------------------------------------------

namespace {

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = {
        "re", "pr", "gr", "alpha", "lambda1", "lambda2", "lambda3", "nu",
        "tau", "h", "curve_n", "max_iters", "stop_tol", "case", "out_dir", "snapshot_stride",
    };
    return keys;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& rule)
{
    throw ConfigError("config key '" + key + "': " + rule + " (got '" + value + "')");
}

double need_double(const std::string& key, const std::string& value)
{
    double x = 0.0;
    if (!parse_double(value, x) || !std::isfinite(x)) {
        bad_value(key, value, "expected a finite number");
    }
    return x;
}

int need_int(const std::string& key, const std::string& value)
{
    int x = 0;
    if (!parse_int(value, x)) {
        double d = 0.0;
        // accept integral values written as reals, e.g. 3e2
        if (parse_double(value, d) && d == std::floor(d) && std::abs(d) < 2e9) {
            return static_cast<int>(d);
        }
        bad_value(key, value, "expected an integer");
    }
    return x;
}

std::string unquote(const std::string& key, const std::string& v)
{
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        const std::string inner = v.substr(1, v.size() - 2);
        if (inner.find('"') != std::string::npos || inner.find('\\') != std::string::npos) {
            bad_value(key, v, "escape sequences are not supported");
        }
        return inner;
    }
    if (!v.empty() && (v.front() == '"' || v.back() == '"')) {
        bad_value(key, v, "unbalanced quotes");
    }
    return v;
}

} // namespace

RunConfig parse_run_config(const std::string& text)
{
    RunConfig cfg;
    OptimizerConfig& o = cfg.optimizer;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line;
        // '#' starts a comment unless it sits inside a quoted value
        bool quoted = false;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '"') {
                quoted = !quoted;
            } else if (body[i] == '#' && !quoted) {
                body.resize(i);
                break;
            }
        }
        body = trim(body);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError("config key '" + key + "' is not recognised (line " + std::to_string(lineno) + ")");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("config key '" + key + "' appears more than once");
        }
        if (value.empty()) {
            bad_value(key, value, "missing value");
        }
        auto positive = [&](double x) {
            if (!(x > 0.0)) {
                bad_value(key, value, "must be positive");
            }
            return x;
        };
        auto non_negative = [&](double x) {
            if (!(x >= 0.0)) {
                bad_value(key, value, "must be non-negative");
            }
            return x;
        };
        if (key == "re") {
            o.physical.Re = positive(need_double(key, value));
        } else if (key == "pr") {
            o.physical.Pr = positive(need_double(key, value));
        } else if (key == "gr") {
            o.physical.Gr = non_negative(need_double(key, value));
        } else if (key == "alpha") {
            o.physical.alpha = need_double(key, value);
        } else if (key == "lambda1") {
            o.penalties.lambda1 = non_negative(need_double(key, value));
        } else if (key == "lambda2") {
            o.penalties.lambda2 = non_negative(need_double(key, value));
        } else if (key == "lambda3") {
            o.penalties.lambda3 = non_negative(need_double(key, value));
        } else if (key == "nu") {
            o.penalties.nu = non_negative(need_double(key, value));
            if (o.penalties.nu >= 1.0) {
                bad_value(key, value, "must be below 1");
            }
        } else if (key == "tau") {
            o.tau = positive(need_double(key, value));
        } else if (key == "h") {
            o.h = positive(need_double(key, value));
            if (o.h > 0.5) {
                bad_value(key, value, "must not exceed 0.5");
            }
        } else if (key == "curve_n") {
            o.curve_n = need_int(key, value);
            if (o.curve_n < 0 || o.curve_n == 1) {
                bad_value(key, value, "must be 0 (automatic) or at least 2");
            }
        } else if (key == "max_iters") {
            o.max_iters = need_int(key, value);
            if (o.max_iters < 0) {
                bad_value(key, value, "must be non-negative");
            }
        } else if (key == "stop_tol") {
            o.stop_tol = positive(need_double(key, value));
        } else if (key == "case") {
            cfg.case_id = need_int(key, value);
            if (cfg.case_id < 1 || cfg.case_id > 5) {
                bad_value(key, value, "must be one of 1..5");
            }
        } else if (key == "out_dir") {
            cfg.out_dir = unquote(key, value);
        } else if (key == "snapshot_stride") {
            o.snapshot_stride = need_int(key, value);
            if (o.snapshot_stride < 1) {
                bad_value(key, value, "must be positive");
            }
        }
    }
    o.preset = cfg.case_id;
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) {
        throw ConfigError("config file '" + path.string() + "' does not exist");
    }
    auto in = open_in(path);
    std::ostringstream s;
    s << in.rdbuf();
    try {
        return parse_run_config(s.str());
    } catch (const ConfigError& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
}

std::string serialize_run_config(const RunConfig& cfg)
{
    const OptimizerConfig& o = cfg.optimizer;
    std::ostringstream s;
    s << "re = " << shortest(o.physical.Re) << '\n';
    s << "pr = " << shortest(o.physical.Pr) << '\n';
    s << "gr = " << shortest(o.physical.Gr) << '\n';
    s << "alpha = " << shortest(o.physical.alpha) << '\n';
    s << "lambda1 = " << shortest(o.penalties.lambda1) << '\n';
    s << "lambda2 = " << shortest(o.penalties.lambda2) << '\n';
    s << "lambda3 = " << shortest(o.penalties.lambda3) << '\n';
    s << "nu = " << shortest(o.penalties.nu) << '\n';
    s << "tau = " << shortest(o.tau) << '\n';
    s << "h = " << shortest(o.h) << '\n';
    s << "curve_n = " << o.curve_n << '\n';
    s << "max_iters = " << o.max_iters << '\n';
    s << "stop_tol = " << shortest(o.stop_tol) << '\n';
    s << "case = " << cfg.case_id << '\n';
    s << "out_dir = \"" << cfg.out_dir << "\"\n";
    s << "snapshot_stride = " << o.snapshot_stride << '\n';
    return s.str();
}

} // namespace bshape
