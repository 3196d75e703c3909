#include "eulerss/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace eulerss {

std::string role_name(Role r) {
    switch (r) {
        case Role::Wall: return "wall";
        case Role::Inflow: return "inflow";
        case Role::Outflow: return "outflow";
    }
    return "wall";
}

Role parse_role(const std::string& s) {
    if (s == "wall") return Role::Wall;
    if (s == "inflow") return Role::Inflow;
    if (s == "outflow") return Role::Outflow;
    throw ConfigError("unknown boundary role '" + s + "' (expected wall, inflow or outflow)");
}

namespace {

std::uint64_t edge_key(int i, int j) {
    auto lo = static_cast<std::uint64_t>(std::min(i, j));
    auto hi = static_cast<std::uint64_t>(std::max(i, j));
    return (lo << 32) | hi;
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

}  // namespace

double Mesh::total_area() const {
    double s = 0;
    for (double a : areas) s += a;
    return s;
}

double Mesh::total_boundary_length() const {
    double s = 0;
    for (const auto& c : components) s += c.length;
    return s;
}

double Mesh::scale() const {
    if (vertices.empty()) return 1.0;
    double xmin = vertices[0].x, xmax = xmin, ymin = vertices[0].y, ymax = ymin;
    for (const auto& v : vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

double Mesh::min_angle_deg() const {
    double best = 180.0;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            Vec2 p = vertices[t[k]];
            Vec2 e1 = vertices[t[(k + 1) % 3]] - p;
            Vec2 e2 = vertices[t[(k + 2) % 3]] - p;
            double ang = std::atan2(std::abs(cross(e1, e2)), dot(e1, e2));
            best = std::min(best, ang * 180.0 / std::numbers::pi);
        }
    }
    return best;
}

double Mesh::max_edge_length() const {
    double h = 0;
    for (const auto& e : interior_edges) h = std::max(h, e.length);
    for (const auto& e : boundary_edges) h = std::max(h, e.length);
    return h;
}

double Mesh::incircle_diameter(int t) const {
    const auto& tri = triangles[t];
    double per = 0;
    for (int k = 0; k < 3; ++k) per += norm(vertices[tri[(k + 1) % 3]] - vertices[tri[k]]);
    return 4.0 * areas[t] / per;
}

std::vector<int> Mesh::components_with_role(Role r) const {
    std::vector<int> out;
    for (const auto& c : components)
        if (c.role == r) out.push_back(c.id);
    return out;
}

double loop_area(const Mesh& m, int comp) {
    double s = 0;
    for (int ei : m.components[comp].edges) {
        const auto& e = m.boundary_edges[ei];
        s += cross(m.vertices[e.a], m.vertices[e.b]);
    }
    return std::abs(0.5 * s);
}

Mesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                const std::vector<std::array<int, 3>>& bedges, const std::vector<Role>& roles,
                std::vector<std::optional<CircleTag>> circles) {
    Mesh m;
    m.vertices = std::move(vertices);
    m.triangles = std::move(triangles);
    const int nv = m.num_vertices();
    const int nt = m.num_triangles();
    const int nc = static_cast<int>(roles.size());
    if (nv == 0 || nt == 0) throw MeshError("mesh has no vertices or no triangles");
    if (nc == 0) throw MeshError("mesh has no boundary components");

    const double sc = m.scale();
    m.areas.resize(nt);
    m.centroids.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = m.triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                throw MeshError("triangle " + std::to_string(t) + " references vertex " + std::to_string(tri[k]) +
                                " out of range");
        double a = signed_area(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]);
        if (a < 0) throw MeshError("inverted triangle " + std::to_string(t) + " (clockwise orientation)");
        if (a < 1e-14 * sc * sc) throw MeshError("degenerate triangle " + std::to_string(t));
        m.areas[t] = a;
        m.centroids[t] = (m.vertices[tri[0]] + m.vertices[tri[1]] + m.vertices[tri[2]]) / 3.0;
    }

    // Edge table: key -> (triangle, local index of the opposite vertex), up to two entries.
    struct Slot {
        int tri[2] = {-1, -1};
        int local[2] = {-1, -1};
        int count = 0;
    };
    std::unordered_map<std::uint64_t, Slot> edges;
    edges.reserve(static_cast<size_t>(nt) * 2);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = m.triangles[t];
        for (int k = 0; k < 3; ++k) {
            int i = tri[(k + 1) % 3], j = tri[(k + 2) % 3];
            auto& s = edges[edge_key(i, j)];
            if (s.count == 2)
                throw MeshError("non-manifold edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            s.tri[s.count] = t;
            s.local[s.count] = k;
            ++s.count;
        }
    }

    m.neighbors.assign(nt, {-1, -1, -1});
    std::unordered_map<std::uint64_t, int> boundary_index;
    m.boundary_edges.reserve(bedges.size());
    for (size_t n = 0; n < bedges.size(); ++n) {
        auto [i, j, c] = bedges[n];
        if (c < 0 || c >= nc)
            throw MeshError("boundary edge " + std::to_string(n) + " has unknown component " + std::to_string(c));
        auto it = edges.find(edge_key(i, j));
        if (it == edges.end() || it->second.count != 1)
            throw MeshError("orphan boundary edge (" + std::to_string(i) + ", " + std::to_string(j) +
                            "): not an edge of exactly one triangle");
        if (boundary_index.count(it->first))
            throw MeshError("duplicate boundary edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        int t = it->second.tri[0];
        int k = it->second.local[0];
        BoundaryEdge be;
        be.a = m.triangles[t][(k + 1) % 3];
        be.b = m.triangles[t][(k + 2) % 3];
        be.comp = c;
        be.tri = t;
        Vec2 d = m.vertices[be.b] - m.vertices[be.a];
        be.length = norm(d);
        be.normal = Vec2{d.y, -d.x} / be.length;
        be.tangent = perp(be.normal);
        be.midpoint = (m.vertices[be.a] + m.vertices[be.b]) * 0.5;
        int idx = static_cast<int>(m.boundary_edges.size());
        boundary_index[it->first] = idx;
        m.neighbors[t][k] = -(1 + idx);
        m.boundary_edges.push_back(be);
    }

    for (const auto& [key, s] : edges) {
        if (s.count == 1) continue;
        InteriorEdge ie;
        int t0 = s.tri[0], k0 = s.local[0];
        ie.a = m.triangles[t0][(k0 + 1) % 3];
        ie.b = m.triangles[t0][(k0 + 2) % 3];
        ie.left = t0;
        ie.right = s.tri[1];
        Vec2 d = m.vertices[ie.b] - m.vertices[ie.a];
        ie.length = norm(d);
        ie.normal = Vec2{d.y, -d.x} / ie.length;
        m.neighbors[t0][k0] = s.tri[1];
        m.neighbors[s.tri[1]][s.local[1]] = t0;
        m.interior_edges.push_back(ie);
    }
    // Hash-map iteration order is unspecified; sort for reproducible summation order.
    std::sort(m.interior_edges.begin(), m.interior_edges.end(), [](const InteriorEdge& x, const InteriorEdge& y) {
        return std::pair(x.left, x.right) < std::pair(y.left, y.right);
    });

    // Components: ordered closed loops.
    m.components.resize(nc);
    std::vector<std::vector<int>> comp_edges(nc);
    for (int e = 0; e < static_cast<int>(m.boundary_edges.size()); ++e) comp_edges[m.boundary_edges[e].comp].push_back(e);
    m.node_component.assign(nv, -1);
    for (int c = 0; c < nc; ++c) {
        auto& comp = m.components[c];
        comp.id = c;
        comp.role = roles[c];
        const auto& ce = comp_edges[c];
        if (ce.empty()) throw MeshError("component " + std::to_string(c) + " has no boundary edges");
        std::unordered_map<int, int> outgoing;
        std::unordered_map<int, int> incoming;
        for (int e : ce) {
            const auto& be = m.boundary_edges[e];
            if (outgoing.count(be.a) || incoming.count(be.b))
                throw MeshError("open boundary loop, component " + std::to_string(c));
            outgoing[be.a] = e;
            incoming[be.b] = e;
        }
        for (int e : ce) {
            if (!outgoing.count(m.boundary_edges[e].b) || !incoming.count(m.boundary_edges[e].a))
                throw MeshError("open boundary loop, component " + std::to_string(c));
        }
        // Start at the edge with the smallest start vertex for a canonical order.
        int start = ce[0];
        for (int e : ce)
            if (m.boundary_edges[e].a < m.boundary_edges[start].a) start = e;
        int e = start;
        do {
            comp.edges.push_back(e);
            comp.nodes.push_back(m.boundary_edges[e].a);
            comp.length += m.boundary_edges[e].length;
            e = outgoing.at(m.boundary_edges[e].b);
        } while (e != start && comp.edges.size() <= ce.size());
        if (comp.edges.size() != ce.size())
            throw MeshError("component " + std::to_string(c) + " consists of more than one loop");
        for (int v : comp.nodes) {
            if (m.node_component[v] != -1)
                throw MeshError("vertex " + std::to_string(v) + " shared by two boundary components");
            m.node_component[v] = c;
        }
    }

    for (const auto& [key, s] : edges) {
        if (s.count == 1 && !boundary_index.count(key)) {
            int t = s.tri[0], k = s.local[0];
            throw MeshError("unlabeled boundary edge (" + std::to_string(m.triangles[t][(k + 1) % 3]) + ", " +
                            std::to_string(m.triangles[t][(k + 2) % 3]) + ")");
        }
    }

    // Orientation: the fluid lies to the left of a -> b, so the outer loop is counter-clockwise
    // and every hole loop is clockwise.
    for (int c = 0; c < nc; ++c) {
        double s = 0;
        for (int ei : m.components[c].edges) {
            const auto& be = m.boundary_edges[ei];
            s += cross(m.vertices[be.a], m.vertices[be.b]);
        }
        if (c == 0 && s <= 0) throw MeshError("component 0 is not the outer boundary");
        if (c > 0 && s >= 0)
            throw MeshError("component " + std::to_string(c) + " is not an inner boundary (component 0 must be the outer one)");
    }

    int chi = m.euler_characteristic();
    int expected = 1 - (nc - 1);
    if (chi != expected)
        throw MeshError("Euler characteristic " + std::to_string(chi) + " does not match " + std::to_string(expected) +
                        " expected for " + std::to_string(nc - 1) + " holes");

    circles.resize(nc);
    m.circles = std::move(circles);
    return m;
}

namespace {

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Mesh parse_mesh(const std::string& text, LoadOptions opts) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::vector<std::pair<int, std::string>> records;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string s = strip_comment(raw);
        if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
        records.emplace_back(lineno, s);
    }
    auto fail = [](int ln, const std::string& msg) -> ConfigError {
        return ConfigError("mesh parse error at line " + std::to_string(ln) + ": " + msg);
    };
    if (records.empty()) throw ConfigError("mesh parse error: empty file");

    size_t cursor = 0;
    auto next = [&](const char* what) -> std::pair<int, std::istringstream> {
        if (cursor >= records.size())
            throw ConfigError(std::string("mesh parse error: unexpected end of file while reading ") + what);
        auto& r = records[cursor++];
        return {r.first, std::istringstream(r.second)};
    };
    auto expect_end = [&](int ln, std::istringstream& ss) {
        std::string extra;
        if (ss >> extra) throw fail(ln, "unexpected trailing token '" + extra + "'");
    };

    long nv = 0, nt = 0, nb = 0, nk = 0;
    {
        auto [ln, ss] = next("header");
        if (!(ss >> nv >> nt >> nb >> nk)) throw fail(ln, "expected header 'V T B K'");
        expect_end(ln, ss);
        if (nv <= 0 || nt <= 0 || nb <= 0 || nk <= 0) throw fail(ln, "counts must be positive");
    }
    std::vector<Vec2> verts(nv);
    for (long i = 0; i < nv; ++i) {
        auto [ln, ss] = next("vertices");
        if (!(ss >> verts[i].x >> verts[i].y)) throw fail(ln, "expected vertex 'x y'");
        expect_end(ln, ss);
    }
    std::vector<std::array<int, 3>> tris(nt);
    for (long i = 0; i < nt; ++i) {
        auto [ln, ss] = next("triangles");
        if (!(ss >> tris[i][0] >> tris[i][1] >> tris[i][2])) throw fail(ln, "expected triangle 'i j k'");
        expect_end(ln, ss);
        for (int k = 0; k < 3; ++k)
            if (tris[i][k] < 0 || tris[i][k] >= nv) throw fail(ln, "vertex index out of range");
    }
    std::vector<std::array<int, 3>> bed(nb);
    for (long i = 0; i < nb; ++i) {
        auto [ln, ss] = next("boundary edges");
        if (!(ss >> bed[i][0] >> bed[i][1] >> bed[i][2])) throw fail(ln, "expected boundary edge 'i j comp'");
        expect_end(ln, ss);
        if (bed[i][0] < 0 || bed[i][0] >= nv || bed[i][1] < 0 || bed[i][1] >= nv)
            throw fail(ln, "vertex index out of range");
        if (bed[i][2] < 0 || bed[i][2] >= nk) throw fail(ln, "component id out of range");
    }
    std::vector<Role> roles(nk, Role::Wall);
    std::vector<bool> seen(nk, false);
    for (long i = 0; i < nk; ++i) {
        auto [ln, ss] = next("components");
        int id = -1;
        std::string role;
        if (!(ss >> id >> role)) throw fail(ln, "expected component 'comp_id role'");
        expect_end(ln, ss);
        if (id < 0 || id >= nk) throw fail(ln, "component id out of range");
        if (seen[id]) throw fail(ln, "duplicate component id");
        seen[id] = true;
        try {
            roles[id] = parse_role(role);
        } catch (const ConfigError& e) {
            throw fail(ln, e.what());
        }
    }
    if (cursor != records.size()) throw fail(records[cursor].first, "unexpected extra content");
    if (opts.require_outer_wall && roles[0] != Role::Wall)
        throw MeshError("component 0 (outer boundary) must have role wall, got " + role_name(roles[0]));
    return build_mesh(std::move(verts), std::move(tris), bed, roles);
}

Mesh load_mesh(const std::string& path, LoadOptions opts) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open mesh file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_mesh(buf.str(), opts);
}

std::string format_mesh(const Mesh& m) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << m.num_vertices() << ' ' << m.num_triangles() << ' ' << m.boundary_edges.size() << ' '
        << m.num_components() << '\n';
    for (const auto& v : m.vertices) out << v.x << ' ' << v.y << '\n';
    for (const auto& t : m.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& c : m.components)
        for (int e : c.edges) {
            const auto& be = m.boundary_edges[e];
            out << be.a << ' ' << be.b << ' ' << be.comp << '\n';
        }
    for (const auto& c : m.components) out << c.id << ' ' << role_name(c.role) << '\n';
    return out.str();
}

void save_mesh(const Mesh& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write mesh file '" + path + "'");
    f << format_mesh(m);
}

Mesh generate_annulus(double r0, double r1, int nr, int ntheta, Role inner_role, Role outer_role) {
    if (!(r0 > 0 && r0 < r1)) throw ConfigError("annulus requires 0 < r0 < r1");
    if (nr < 2 || ntheta < 8) throw ConfigError("annulus requires nr >= 2 and ntheta >= 8");
    std::vector<Vec2> verts;
    verts.reserve(static_cast<size_t>(nr + 1) * ntheta);
    for (int k = 0; k <= nr; ++k) {
        double r = r0 + k * (r1 - r0) / nr;
        if (k == nr) r = r1;
        for (int j = 0; j < ntheta; ++j) {
            double th = 2.0 * std::numbers::pi * j / ntheta;
            verts.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    auto id = [ntheta](int k, int j) { return k * ntheta + (j % ntheta); };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<size_t>(2) * nr * ntheta);
    for (int k = 0; k < nr; ++k)
        for (int j = 0; j < ntheta; ++j) {
            // Going out in r then forward in angle is counter-clockwise.
            tris.push_back({id(k, j), id(k + 1, j), id(k + 1, j + 1)});
            tris.push_back({id(k, j), id(k + 1, j + 1), id(k, j + 1)});
        }
    std::vector<std::array<int, 3>> bed;
    for (int j = 0; j < ntheta; ++j) {
        bed.push_back({id(nr, j), id(nr, j + 1), 0});
        bed.push_back({id(0, j), id(0, j + 1), 1});
    }
    std::vector<std::optional<CircleTag>> circles{CircleTag{{0, 0}, r1}, CircleTag{{0, 0}, r0}};
    return build_mesh(std::move(verts), std::move(tris), bed, {outer_role, inner_role}, std::move(circles));
}

Mesh uniform_refine(const Mesh& m) {
    std::vector<Vec2> verts = m.vertices;
    std::unordered_map<std::uint64_t, int> mid;
    std::vector<int> bcomp_of_edge;
    std::unordered_map<std::uint64_t, int> bcomp;
    for (const auto& be : m.boundary_edges) bcomp[edge_key(be.a, be.b)] = be.comp;

    auto midpoint = [&](int i, int j) {
        auto key = edge_key(i, j);
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        Vec2 p = (m.vertices[i] + m.vertices[j]) * 0.5;
        auto bc = bcomp.find(key);
        if (bc != bcomp.end() && m.circles[bc->second]) {
            const auto& c = *m.circles[bc->second];
            Vec2 d = p - c.center;
            p = c.center + d * (c.radius / norm(d));
        }
        int idx = static_cast<int>(verts.size());
        verts.push_back(p);
        mid.emplace(key, idx);
        return idx;
    };

    std::vector<std::array<int, 3>> tris;
    tris.reserve(m.triangles.size() * 4);
    for (const auto& t : m.triangles) {
        int a = t[0], b = t[1], c = t[2];
        int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        tris.push_back({a, ab, ca});
        tris.push_back({ab, b, bc});
        tris.push_back({ca, bc, c});
        tris.push_back({ab, bc, ca});
    }
    std::vector<std::array<int, 3>> bed;
    bed.reserve(m.boundary_edges.size() * 2);
    for (const auto& comp : m.components)
        for (int e : comp.edges) {
            const auto& be = m.boundary_edges[e];
            int mm = mid.at(edge_key(be.a, be.b));
            bed.push_back({be.a, mm, be.comp});
            bed.push_back({mm, be.b, be.comp});
        }
    std::vector<Role> roles;
    for (const auto& c : m.components) roles.push_back(c.role);
    return build_mesh(std::move(verts), std::move(tris), bed, roles, m.circles);
}

}  // namespace eulerss
