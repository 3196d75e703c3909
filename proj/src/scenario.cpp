#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "eulerss/transport.hpp"

namespace eulerss {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
    double v = obj[key].get<double>();
    if (!std::isfinite(v)) throw ConfigError("'" + key + "' in " + where + " is not finite");
    return v;
}

double get_number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
    return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number_integer()) throw ConfigError("'" + key + "' in " + where + " must be an integer");
    return obj[key].get<int>();
}

Vec2 get_vec(const json& obj, const std::string& key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("'" + key + "' in " + where + " must be a two-element array");
    return {v[0].get<double>(), v[1].get<double>()};
}

MeshSource parse_mesh_source(const json& j) {
    MeshSource src;
    if (j.is_string()) {
        src.path = j.get<std::string>();
        return src;
    }
    check_keys(j, {"annulus", "path", "refine"}, "mesh");
    if (j.contains("annulus") == j.contains("path"))
        throw ConfigError("mesh needs exactly one of 'annulus' or 'path'");
    if (j.contains("refine")) src.refine = get_int(j, "refine", "mesh");
    if (src.refine < 0) throw ConfigError("mesh.refine must be non-negative");
    if (j.contains("path")) {
        if (!j["path"].is_string()) throw ConfigError("mesh.path must be a string");
        src.path = j["path"].get<std::string>();
        return src;
    }
    const json& a = j["annulus"];
    check_keys(a, {"r0", "r1", "nr", "ntheta", "inner_role", "outer_role"}, "mesh.annulus");
    AnnulusSpec spec;
    spec.r0 = get_number_or(a, "r0", spec.r0, "mesh.annulus");
    spec.r1 = get_number_or(a, "r1", spec.r1, "mesh.annulus");
    if (a.contains("nr")) spec.nr = get_int(a, "nr", "mesh.annulus");
    if (a.contains("ntheta")) spec.ntheta = get_int(a, "ntheta", "mesh.annulus");
    try {
        if (a.contains("inner_role")) spec.inner_role = parse_role(a["inner_role"].get<std::string>());
        if (a.contains("outer_role")) spec.outer_role = parse_role(a["outer_role"].get<std::string>());
    } catch (const json::exception&) {
        throw ConfigError("annulus roles must be strings");
    }
    src.annulus = spec;
    return src;
}

BoundaryProfile parse_profile(const json& j) {
    check_keys(j, {"comp", "profile", "value", "s", "values"}, "g entry");
    BoundaryProfile p;
    p.comp = get_int(j, "comp", "g entry");
    std::string kind = j.contains("profile") ? j["profile"].get<std::string>() : "constant";
    if (kind == "constant" || kind == "flux") {
        p.kind = kind == "constant" ? BoundaryProfile::Kind::Constant : BoundaryProfile::Kind::Flux;
        p.value = get_number(j, "value", "g entry");
    } else if (kind == "table") {
        p.kind = BoundaryProfile::Kind::Table;
        if (!j.contains("s") || !j.contains("values")) throw ConfigError("table profile needs 's' and 'values'");
        p.s = j["s"].get<std::vector<double>>();
        p.values = j["values"].get<std::vector<double>>();
        if (p.s.empty() || p.s.size() != p.values.size())
            throw ConfigError("table profile: 's' and 'values' must be non-empty and of equal length");
        if (!std::is_sorted(p.s.begin(), p.s.end()) || p.s.front() < 0 || p.s.back() > 1)
            throw ConfigError("table profile: 's' must be sorted within [0, 1]");
    } else {
        throw ConfigError("unknown g profile '" + kind + "'");
    }
    return p;
}

VorticityProfile parse_vorticity(const json& j) {
    VorticityProfile v;
    if (j.is_number()) {
        v.value = j.get<double>();
        return v;
    }
    check_keys(j, {"profile", "value", "background", "r_min", "r_max", "center", "normal", "offset", "width",
                   "amplitude", "path"},
               "omega0");
    if (!j.contains("profile")) throw ConfigError("omega0 object needs a 'profile'");
    std::string kind = j["profile"].get<std::string>();
    v.background = get_number_or(j, "background", 0.0, "omega0");
    if (kind == "constant") {
        v.kind = VorticityProfile::Kind::Constant;
        v.value = get_number(j, "value", "omega0");
    } else if (kind == "band") {
        v.kind = VorticityProfile::Kind::Band;
        v.value = get_number(j, "value", "omega0");
        v.r_min = get_number(j, "r_min", "omega0");
        v.r_max = get_number(j, "r_max", "omega0");
        if (j.contains("center")) v.center = get_vec(j, "center", "omega0");
    } else if (kind == "halfplane") {
        v.kind = VorticityProfile::Kind::HalfPlane;
        v.value = get_number(j, "value", "omega0");
        if (j.contains("normal")) v.normal = get_vec(j, "normal", "omega0");
        v.offset = get_number_or(j, "offset", 0.0, "omega0");
    } else if (kind == "gaussian") {
        v.kind = VorticityProfile::Kind::Gaussian;
        v.value = get_number(j, "amplitude", "omega0");
        v.width = get_number(j, "width", "omega0");
        if (!(v.width > 0)) throw ConfigError("omega0 gaussian width must be positive");
        if (j.contains("center")) v.center = get_vec(j, "center", "omega0");
    } else if (kind == "file") {
        v.kind = VorticityProfile::Kind::File;
        if (!j.contains("path") || !j["path"].is_string()) throw ConfigError("omega0 file profile needs 'path'");
        v.path = j["path"].get<std::string>();
    } else {
        throw ConfigError("unknown omega0 profile '" + kind + "'");
    }
    return v;
}

std::vector<InflowValue> parse_inflow(const json& j) {
    std::vector<InflowValue> out;
    if (j.is_number()) {
        out.push_back({-1, j.get<double>(), {}});
        return out;
    }
    if (!j.is_array()) throw ConfigError("omega_in must be a number or an array");
    for (const json& e : j) {
        check_keys(e, {"comp", "value", "table"}, "omega_in entry");
        InflowValue iv;
        iv.comp = get_int(e, "comp", "omega_in entry");
        if (e.contains("table")) {
            for (const json& row : e["table"]) {
                if (!row.is_array() || row.size() != 2) throw ConfigError("omega_in table rows must be [t, value]");
                iv.table.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            if (iv.table.empty()) throw ConfigError("omega_in table is empty");
            if (!std::is_sorted(iv.table.begin(), iv.table.end()))
                throw ConfigError("omega_in table times must be increasing");
        } else {
            iv.value = get_number(e, "value", "omega_in entry");
        }
        out.push_back(std::move(iv));
    }
    return out;
}

std::string resolve(const std::string& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute()) return p;
    return (std::filesystem::path(base) / path).string();
}

}  // namespace

double InflowValue::at(double t) const {
    if (table.empty()) return value;
    if (t <= table.front().first) return table.front().second;
    if (t >= table.back().first) return table.back().second;
    auto it = std::upper_bound(table.begin(), table.end(), std::make_pair(t, -INFINITY),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    double w = (t - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        check_keys(j, {"mesh", "g", "g_scale", "omega0", "omega_in", "C0", "T", "cfl", "snapshots", "description"},
                   "scenario");
        Scenario sc;
        sc.base_dir = base_dir;
        if (!j.contains("mesh")) throw ConfigError("scenario needs a 'mesh'");
        sc.mesh = parse_mesh_source(j["mesh"]);
        if (j.contains("g")) {
            if (!j["g"].is_array()) throw ConfigError("'g' must be an array");
            for (const json& e : j["g"]) sc.g.push_back(parse_profile(e));
        }
        sc.g_scale = get_number_or(j, "g_scale", 1.0, "scenario");
        if (j.contains("omega0")) sc.omega0 = parse_vorticity(j["omega0"]);
        if (j.contains("omega_in")) sc.omega_in = parse_inflow(j["omega_in"]);
        if (j.contains("C0")) {
            if (!j["C0"].is_array()) throw ConfigError("'C0' must be an array with one entry per component");
            sc.C0 = j["C0"].get<std::vector<double>>();
        }
        sc.T = get_number(j, "T", "scenario");
        if (sc.T < 0) throw ConfigError("T must be non-negative");
        sc.cfl = get_number_or(j, "cfl", 0.5, "scenario");
        if (!(sc.cfl > 0 && sc.cfl < 1)) throw ConfigError("cfl must lie in (0, 1)");
        if (j.contains("snapshots")) sc.snapshots = get_int(j, "snapshots", "scenario");
        if (sc.snapshots < 1) throw ConfigError("snapshots must be at least 1");
        return sc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario has a wrongly typed value: ") + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto parent = std::filesystem::path(path).parent_path();
    return parse_scenario(ss.str(), parent.empty() ? "." : parent.string());
}

Mesh build_scenario_mesh(const Scenario& sc) {
    Mesh m = sc.mesh.annulus
                 ? generate_annulus(sc.mesh.annulus->r0, sc.mesh.annulus->r1, sc.mesh.annulus->nr,
                                    sc.mesh.annulus->ntheta, sc.mesh.annulus->inner_role, sc.mesh.annulus->outer_role)
                 : load_mesh(resolve(sc.base_dir, sc.mesh.path));
    for (int k = 0; k < sc.mesh.refine; ++k) m = uniform_refine(m);
    return m;
}

EdgeData scenario_boundary_flux(const Mesh& m, const Scenario& sc) {
    EdgeData g(m.boundary_edges.size(), 0.0);
    std::vector<char> seen(m.num_components(), 0);
    for (const auto& p : sc.g) {
        if (p.comp < 0 || p.comp >= m.num_components())
            throw ConfigError("g entry refers to unknown component " + std::to_string(p.comp));
        if (seen[p.comp]++) throw ConfigError("component " + std::to_string(p.comp) + " has two g entries");
        const auto& comp = m.components[p.comp];
        double s0 = 0;
        for (int e : comp.edges) {
            const auto& be = m.boundary_edges[e];
            double val = p.value;
            if (p.kind == BoundaryProfile::Kind::Flux) {
                val = p.value / comp.length;
            } else if (p.kind == BoundaryProfile::Kind::Table) {
                double s = (s0 + 0.5 * be.length) / comp.length;
                auto it = std::upper_bound(p.s.begin(), p.s.end(), s);
                if (it == p.s.begin() || it == p.s.end()) {
                    // Periodic wrap between the last and first table points.
                    double s_lo = p.s.back() - 1.0, s_hi = p.s.front();
                    double v_lo = p.values.back(), v_hi = p.values.front();
                    double ss = it == p.s.begin() ? s : s - 1.0;
                    val = s_hi > s_lo ? v_lo + (ss - s_lo) / (s_hi - s_lo) * (v_hi - v_lo) : v_lo;
                } else {
                    size_t k = it - p.s.begin();
                    double w = (s - p.s[k - 1]) / (p.s[k] - p.s[k - 1]);
                    val = p.values[k - 1] + w * (p.values[k] - p.values[k - 1]);
                }
            }
            g[e] = sc.g_scale * val;
            s0 += be.length;
        }
    }
    return g;
}

P0Scalar scenario_initial_vorticity(const Mesh& m, const Scenario& sc) {
    const auto& v = sc.omega0;
    P0Scalar w(m.num_triangles(), 0.0);
    if (v.kind == VorticityProfile::Kind::File) {
        std::ifstream in(resolve(sc.base_dir, v.path));
        if (!in) throw ConfigError("cannot open vorticity file '" + v.path + "'");
        for (int t = 0; t < m.num_triangles(); ++t)
            if (!(in >> w[t])) throw ConfigError("vorticity file '" + v.path + "' has fewer values than triangles");
        double extra;
        if (in >> extra) throw ConfigError("vorticity file '" + v.path + "' has more values than triangles");
    } else {
        for (int t = 0; t < m.num_triangles(); ++t) {
            Vec2 x = m.centroids[t];
            switch (v.kind) {
                case VorticityProfile::Kind::Constant: w[t] = v.value; break;
                case VorticityProfile::Kind::Band: {
                    double r = norm(x - v.center);
                    w[t] = (r >= v.r_min && r <= v.r_max) ? v.value : v.background;
                    break;
                }
                case VorticityProfile::Kind::HalfPlane:
                    w[t] = dot(x, v.normal) > v.offset ? v.value : v.background;
                    break;
                case VorticityProfile::Kind::Gaussian:
                    w[t] = v.background + v.value * std::exp(-norm2(x - v.center) / (v.width * v.width));
                    break;
                default: break;
            }
        }
    }
    for (double& x : w) {
        x += v.shift;
        if (!std::isfinite(x)) throw ConfigError("initial vorticity is not finite");
    }
    return w;
}

std::vector<double> scenario_initial_circulations(const Mesh& m, const Scenario& sc) {
    if (sc.C0.empty()) return std::vector<double>(m.num_components(), 0.0);
    if (static_cast<int>(sc.C0.size()) != m.num_components())
        throw ConfigError("C0 has " + std::to_string(sc.C0.size()) + " entries but the mesh has " +
                          std::to_string(m.num_components()) + " boundary components");
    return sc.C0;
}

double scenario_inflow_vorticity(const Scenario& sc, int comp, double t) {
    double v = 0;
    bool found = false;
    for (const auto& iv : sc.omega_in)
        if (iv.comp == comp) {
            v = iv.at(t);
            found = true;
        }
    if (!found)
        for (const auto& iv : sc.omega_in)
            if (iv.comp == -1) v = iv.at(t);
    return v + sc.omega_in_shift;
}

}  // namespace eulerss
