#include "subres/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace subres::cli {

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + " must be finite");
    return v;
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
    return j.get<int>();
}

std::complex<double> complex_value(const json& j, const std::string& where)
{
    if (j.is_number()) return {number(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], where), number(j[1], where)};
    throw ConfigError(where + " must be a number or a [re, im] pair");
}

std::vector<double> number_list(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + " must be a list");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(number(e, where));
    return out;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

template <class T>
void read(const json& j, const char* key, T& target, const std::string& where)
{
    if (!j.contains(key)) return;
    const std::string path = where + "." + key;
    if constexpr (std::is_same_v<T, double>)
        target = number(j.at(key), path);
    else if constexpr (std::is_same_v<T, int>)
        target = integer(j.at(key), path);
    else if constexpr (std::is_same_v<T, bool>) {
        if (!j.at(key).is_boolean()) throw ConfigError(path + " must be a boolean");
        target = j.at(key).get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!j.at(key).is_string()) throw ConfigError(path + " must be a string");
        target = j.at(key).get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>)
        target = number_list(j.at(key), path);
}

PotentialSpec parse_potential(const json& j)
{
    PotentialSpec p;
    if (j.is_string()) {
        p.type = "builtin";
        p.name = j.get<std::string>();
        return p;
    }
    check_keys(j, "potential", {"type", "name", "matrix", "coeffs"});
    read(j, "type", p.type, "potential");
    if (p.type == "builtin") {
        read(j, "name", p.name, "potential");
    } else if (p.type == "quadratic") {
        p.name.clear();
        if (!j.contains("matrix") || !j.at("matrix").is_array() || j.at("matrix").empty())
            throw ConfigError("quadratic potential needs a nonempty 'matrix'");
        const json& m = j.at("matrix");
        // A single [re, im] pair (or number) is accepted as a 1x1 matrix.
        if (m.size() == 2 && m[0].is_number() && m[1].is_number()) {
            p.matrix = {{complex_value(m, "potential.matrix")}};
        } else {
            for (const auto& row : m) {
                if (!row.is_array()) throw ConfigError("potential.matrix rows must be lists");
                std::vector<std::complex<double>> r;
                for (const auto& e : row) r.push_back(complex_value(e, "potential.matrix"));
                p.matrix.push_back(std::move(r));
            }
        }
        for (const auto& row : p.matrix)
            if (row.size() != p.matrix.size()) throw ConfigError("potential.matrix must be square");
    } else if (p.type == "linear") {
        p.name.clear();
        if (!j.contains("coeffs") || !j.at("coeffs").is_array())
            throw ConfigError("linear potential needs 'coeffs'");
        for (const auto& e : j.at("coeffs")) p.coeffs.push_back(complex_value(e, "potential.coeffs"));
    } else {
        throw ConfigError("unknown potential type '" + p.type + "'");
    }
    return p;
}

json potential_json(const PotentialSpec& p)
{
    json j;
    j["type"] = p.type;
    if (p.type == "builtin") j["name"] = p.name;
    if (p.type == "quadratic") {
        json m = json::array();
        for (const auto& row : p.matrix) {
            json r = json::array();
            for (auto v : row) r.push_back(complex_json(v));
            m.push_back(r);
        }
        j["matrix"] = m;
    }
    if (p.type == "linear") {
        json c = json::array();
        for (auto v : p.coeffs) c.push_back(complex_json(v));
        j["coeffs"] = c;
    }
    return j;
}

WindowSpec parse_window(const json& j)
{
    check_keys(j, "window", {"kind", "re_min", "re_max", "im_min", "im_max", "re_steps", "im_steps",
                             "r_min", "r_max", "r_steps", "angle_max", "angle_steps"});
    WindowSpec w;
    read(j, "kind", w.kind, "window");
    if (w.kind != "rect" && w.kind != "polar") throw ConfigError("window.kind must be rect or polar");
    read(j, "re_min", w.re_min, "window");
    read(j, "re_max", w.re_max, "window");
    read(j, "im_min", w.im_min, "window");
    read(j, "im_max", w.im_max, "window");
    read(j, "re_steps", w.re_steps, "window");
    read(j, "im_steps", w.im_steps, "window");
    read(j, "r_min", w.r_min, "window");
    read(j, "r_max", w.r_max, "window");
    read(j, "r_steps", w.r_steps, "window");
    read(j, "angle_max", w.angle_max, "window");
    read(j, "angle_steps", w.angle_steps, "window");
    return w;
}

json window_json(const WindowSpec& w)
{
    return json{{"kind", w.kind},         {"re_min", w.re_min},   {"re_max", w.re_max},
                {"im_min", w.im_min},     {"im_max", w.im_max},   {"re_steps", w.re_steps},
                {"im_steps", w.im_steps}, {"r_min", w.r_min},     {"r_max", w.r_max},
                {"r_steps", w.r_steps},   {"angle_max", w.angle_max}, {"angle_steps", w.angle_steps}};
}

}  // namespace

Potential make_potential(const PotentialSpec& spec)
{
    if (spec.type == "builtin") return builtin_by_name(spec.name);
    if (spec.type == "quadratic") {
        const auto n = static_cast<Eigen::Index>(spec.matrix.size());
        CMat q(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                q(r, c) = spec.matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        return builtin_quadratic(q);
    }
    if (spec.type == "linear") {
        CVec c(static_cast<Eigen::Index>(spec.coeffs.size()));
        for (std::size_t i = 0; i < spec.coeffs.size(); ++i) c[static_cast<Eigen::Index>(i)] = spec.coeffs[i];
        return builtin_linear(c);
    }
    throw ConfigError("unknown potential type '" + spec.type + "'");
}

std::vector<cplx> WindowSpec::points() const
{
    std::vector<cplx> out;
    if (kind == "rect") {
        if (re_steps < 1 || im_steps < 1) return out;
        for (int b = 0; b < im_steps; ++b)
            for (int a = 0; a < re_steps; ++a) {
                const double re = re_steps == 1 ? re_min : re_min + (re_max - re_min) * a / (re_steps - 1);
                const double im = im_steps == 1 ? im_min : im_min + (im_max - im_min) * b / (im_steps - 1);
                out.emplace_back(re, im);
            }
    } else {
        if (r_steps < 1 || angle_steps < 1 || !(r_min > 0.0)) return out;
        for (int a = 0; a < angle_steps; ++a)
            for (int b = 0; b < r_steps; ++b) {
                const double r = r_steps == 1 ? r_min : r_min * std::pow(r_max / r_min, static_cast<double>(b) / (r_steps - 1));
                const double theta =
                    angle_steps == 1 ? 0.0 : -angle_max + 2.0 * angle_max * a / (angle_steps - 1);
                out.emplace_back(r * std::sin(theta), r * std::cos(theta));
            }
    }
    return out;
}

RunConfig parse_config(const json& j)
{
    check_keys(j, "config", {"potential", "grid", "region", "grid_policy", "h_list", "h", "z_list",
                             "window", "s_list", "z", "x0", "xi0", "admissibility", "weights",
                             "wick", "output_dir", "seed", "jobs"});
    RunConfig c;
    if (j.contains("potential")) c.potential = parse_potential(j.at("potential"));
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"dim", "half_width", "points_per_dim"});
        read(g, "dim", c.grid.dim, "grid");
        read(g, "half_width", c.grid.half_width, "grid");
        read(g, "points_per_dim", c.grid.points_per_dim, "grid");
    }
    if (j.contains("region")) {
        const json& r = j.at("region");
        check_keys(r, "region", {"T", "K", "A", "M"});
        read(r, "T", c.region.t, "region");
        read(r, "K", c.region.k, "region");
        read(r, "A", c.region.a, "region");
        read(r, "M", c.region.m, "region");
    }
    if (j.contains("grid_policy")) {
        const json& g = j.at("grid_policy");
        check_keys(g, "grid_policy", {"l_min", "l_scale", "l_offset", "n_min", "kappa_min",
                                      "kappa_margin", "max_refinements"});
        read(g, "l_min", c.grid_policy.l_min, "grid_policy");
        read(g, "l_scale", c.grid_policy.l_scale, "grid_policy");
        read(g, "l_offset", c.grid_policy.l_offset, "grid_policy");
        read(g, "n_min", c.grid_policy.n_min, "grid_policy");
        read(g, "kappa_min", c.grid_policy.kappa_min, "grid_policy");
        read(g, "kappa_margin", c.grid_policy.kappa_margin, "grid_policy");
        read(g, "max_refinements", c.grid_policy.max_refinements, "grid_policy");
    }
    read(j, "h_list", c.h_list, "config");
    read(j, "h", c.h, "config");
    if (j.contains("z_list")) {
        if (!j.at("z_list").is_array()) throw ConfigError("z_list must be a list");
        for (const auto& e : j.at("z_list")) c.z_list.push_back(complex_value(e, "z_list"));
    }
    if (j.contains("window")) c.window = parse_window(j.at("window"));
    read(j, "s_list", c.s_list, "config");
    if (j.contains("z")) c.z = complex_value(j.at("z"), "z");
    read(j, "x0", c.x0, "config");
    read(j, "xi0", c.xi0, "config");
    if (j.contains("admissibility")) {
        const json& a = j.at("admissibility");
        check_keys(a, "admissibility", {"box_lo", "box_hi", "samples_per_dim", "t_candidate",
                                        "restricted_level", "bisect_t"});
        if (a.contains("box_lo")) c.box_lo = number_list(a.at("box_lo"), "admissibility.box_lo");
        if (a.contains("box_hi")) c.box_hi = number_list(a.at("box_hi"), "admissibility.box_hi");
        read(a, "samples_per_dim", c.samples_per_dim, "admissibility");
        if (a.contains("t_candidate")) c.t_candidate = number(a.at("t_candidate"), "admissibility.t_candidate");
        if (a.contains("restricted_level"))
            c.restricted_level = number(a.at("restricted_level"), "admissibility.restricted_level");
        read(a, "bisect_t", c.bisect_t, "admissibility");
    }
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        check_keys(w, "weights", {"epsilon", "c0"});
        if (w.contains("epsilon")) c.epsilon = number(w.at("epsilon"), "weights.epsilon");
        if (w.contains("c0")) c.c0 = number(w.at("c0"), "weights.c0");
    }
    if (j.contains("wick")) {
        const json& w = j.at("wick");
        check_keys(w, "wick", {"dy", "deta"});
        read(w, "dy", c.wick_dy, "wick");
        read(w, "deta", c.wick_deta, "wick");
    }
    read(j, "output_dir", c.output_dir, "config");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    read(j, "jobs", c.jobs, "config");
    if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c)
{
    json j;
    j["potential"] = potential_json(c.potential);
    j["grid"] = {{"dim", c.grid.dim},
                 {"half_width", c.grid.half_width},
                 {"points_per_dim", c.grid.points_per_dim}};
    j["region"] = {{"T", c.region.t}, {"K", c.region.k}, {"A", c.region.a}, {"M", c.region.m}};
    j["grid_policy"] = {{"l_min", c.grid_policy.l_min},
                        {"l_scale", c.grid_policy.l_scale},
                        {"l_offset", c.grid_policy.l_offset},
                        {"n_min", c.grid_policy.n_min},
                        {"kappa_min", c.grid_policy.kappa_min},
                        {"kappa_margin", c.grid_policy.kappa_margin},
                        {"max_refinements", c.grid_policy.max_refinements}};
    j["h_list"] = c.h_list;
    j["h"] = c.h;
    json zl = json::array();
    for (auto z : c.z_list) zl.push_back(complex_json(z));
    j["z_list"] = zl;
    if (c.window) j["window"] = window_json(*c.window);
    j["s_list"] = c.s_list;
    j["z"] = complex_json(c.z);
    j["x0"] = c.x0;
    j["xi0"] = c.xi0;
    json adm = {{"samples_per_dim", c.samples_per_dim}, {"bisect_t", c.bisect_t}};
    if (c.box_lo) adm["box_lo"] = *c.box_lo;
    if (c.box_hi) adm["box_hi"] = *c.box_hi;
    if (c.t_candidate) adm["t_candidate"] = *c.t_candidate;
    if (c.restricted_level) adm["restricted_level"] = *c.restricted_level;
    j["admissibility"] = adm;
    json w = json::object();
    if (c.epsilon) w["epsilon"] = *c.epsilon;
    if (c.c0) w["c0"] = *c.c0;
    j["weights"] = w;
    j["wick"] = {{"dy", c.wick_dy}, {"deta", c.wick_deta}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    return j;
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("empty key segment in override '" + path + "'");
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
    (*node)[parts.back()] = value;
}

std::string config_hash(const RunConfig& c)
{
    // Worker count and output location do not change results.
    json j = to_json(c);
    j.erase("jobs");
    j.erase("output_dir");
    const std::string canonical = j.dump();
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char ch : canonical) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace subres::cli
