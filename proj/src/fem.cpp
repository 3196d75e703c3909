#include "eulerss/fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace eulerss {

LaplaceOperator::LaplaceOperator(const Mesh& m) : mesh_(&m) {
    const int nt = m.num_triangles();
    grads_.resize(nt);
    node_mass_.assign(m.num_vertices(), 0.0);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(nt) * 9);
    const double sc = m.scale();
    for (int t = 0; t < nt; ++t) {
        const auto& tri = m.triangles[t];
        const double area =
            0.5 * cross(m.vertices[tri[1]] - m.vertices[tri[0]], m.vertices[tri[2]] - m.vertices[tri[0]]);
        if (area < 1e-14 * sc * sc) throw MeshError("degenerate triangle " + std::to_string(t) + " in assembly");
        for (int i = 0; i < 3; ++i) {
            const Vec2& pj = m.vertices[tri[(i + 1) % 3]];
            const Vec2& pk = m.vertices[tri[(i + 2) % 3]];
            grads_[t][i] = Vec2{pj.y - pk.y, pk.x - pj.x} / (2.0 * area);
        }
        for (int i = 0; i < 3; ++i) {
            node_mass_[tri[i]] += area / 3.0;
            for (int j = 0; j < 3; ++j) trip.push_back({tri[i], tri[j], dot(grads_[t][i], grads_[t][j]) * area});
        }
    }
    A_ = CsrMatrix::from_triplets(m.num_vertices(), std::move(trip));
}

LaplaceOperator assemble_stiffness(const Mesh& m) { return LaplaceOperator(m); }

std::vector<double> mass_pairing(const LaplaceOperator& op, const P0Scalar& f) {
    const Mesh& m = op.mesh();
    std::vector<double> b(m.num_vertices(), 0.0);
    for (int t = 0; t < m.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) b[m.triangles[t][k]] += f[t] * m.areas[t] / 3.0;
    return b;
}

std::vector<double> vorticity_load(const LaplaceOperator& op, const P0Scalar& omega) {
    auto b = mass_pairing(op, omega);
    for (double& x : b) x = -x;
    return b;
}

std::vector<double> boundary_load(const LaplaceOperator& op, const EdgeData& g) {
    const Mesh& m = op.mesh();
    std::vector<double> b(m.num_vertices(), 0.0);
    for (size_t e = 0; e < m.boundary_edges.size(); ++e) {
        const auto& be = m.boundary_edges[e];
        const double half = 0.5 * g[e] * be.length;
        b[be.a] += half;
        b[be.b] += half;
    }
    return b;
}

P1Field solve_constrained(const LaplaceOperator& op, const std::vector<double>& load, const std::vector<char>& pinned,
                          const std::vector<double>& pinned_values, SolveInfo* info, const P1Field* initial_guess) {
    const CsrMatrix& A = op.matrix();
    const int n = A.size();
    std::vector<int> old_to_new(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
        if (!pinned[i]) old_to_new[i] = nf++;
    P1Field u(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (pinned[i]) u[i] = pinned_values[i];
    if (nf == 0) return u;

    // Symmetric elimination: move the pinned columns to the right-hand side.
    std::vector<double> rhs(nf, 0.0);
    const auto& rp = A.row_ptr();
    const auto& ci = A.cols();
    const auto& va = A.values();
    for (int i = 0; i < n; ++i) {
        int fi = old_to_new[i];
        if (fi < 0) continue;
        double s = load[i];
        for (int k = rp[i]; k < rp[i + 1]; ++k)
            if (pinned[ci[k]]) s -= va[k] * u[ci[k]];
        rhs[fi] = s;
    }
    CsrMatrix Af = A.submatrix(old_to_new, nf);
    std::vector<double> x(nf, 0.0);
    if (initial_guess)
        for (int i = 0; i < n; ++i)
            if (old_to_new[i] >= 0) x[old_to_new[i]] = (*initial_guess)[i];
    CgResult r = pcg(Af, rhs, x);
    if (info) {
        info->iterations = r.iterations;
        info->relative_residual = r.relative_residual;
    }
    for (int i = 0; i < n; ++i)
        if (old_to_new[i] >= 0) u[i] = x[old_to_new[i]];
    return u;
}

P1Field solve_dirichlet(const LaplaceOperator& op, const std::vector<double>& load,
                        const std::vector<double>& component_values, SolveInfo* info, const P1Field* initial_guess) {
    const Mesh& m = op.mesh();
    if (static_cast<int>(component_values.size()) != m.num_components())
        throw ConfigError("solve_dirichlet: one boundary value per component required");
    std::vector<char> pinned(m.num_vertices(), 0);
    std::vector<double> vals(m.num_vertices(), 0.0);
    for (int v = 0; v < m.num_vertices(); ++v)
        if (m.node_component[v] >= 0) {
            pinned[v] = 1;
            vals[v] = component_values[m.node_component[v]];
        }
    return solve_constrained(op, load, pinned, vals, info, initial_guess);
}

P1Field solve_dirichlet_trace(const LaplaceOperator& op, const std::vector<double>& load, const P1Field& trace,
                              SolveInfo* info) {
    const Mesh& m = op.mesh();
    std::vector<char> pinned(m.num_vertices(), 0);
    for (int v = 0; v < m.num_vertices(); ++v) pinned[v] = m.node_component[v] >= 0;
    return solve_constrained(op, load, pinned, trace, info);
}

P1Field solve_neumann(const LaplaceOperator& op, const EdgeData& g, SolveInfo* info) {
    const Mesh& m = op.mesh();
    double net = 0, gmax = 0;
    for (size_t e = 0; e < m.boundary_edges.size(); ++e) {
        net += g[e] * m.boundary_edges[e].length;
        gmax = std::max(gmax, std::abs(g[e]));
    }
    if (std::abs(net) > 1e-10 * m.total_boundary_length() * gmax) {
        std::ostringstream msg;
        msg << std::setprecision(17) << "incompatible Neumann data: net boundary flux " << net << " is not zero";
        throw PreconditionError(msg.str());
    }
    P1Field phi(m.num_vertices(), 0.0);
    if (gmax == 0) return phi;
    CgOptions opts;
    opts.deflate_constant = true;
    CgResult r = pcg(op.matrix(), boundary_load(op, g), phi, opts);
    if (info) {
        info->iterations = r.iterations;
        info->relative_residual = r.relative_residual;
    }
    const double mean = integrate_p1(m, phi) / m.total_area();
    for (double& x : phi) x -= mean;
    return phi;
}

P1Field solve_mixed(const LaplaceOperator& op, const std::vector<int>& dirichlet_components,
                    const std::vector<double>& dirichlet_values, const EdgeData& neumann_g,
                    const std::vector<double>& volume_load, SolveInfo* info) {
    const Mesh& m = op.mesh();
    if (dirichlet_components.empty()) throw ConfigError("solve_mixed: at least one Dirichlet component required");
    if (dirichlet_values.size() != dirichlet_components.size())
        throw ConfigError("solve_mixed: one value per Dirichlet component required");
    std::vector<char> is_dir(m.num_components(), 0);
    std::vector<double> comp_val(m.num_components(), 0.0);
    for (size_t k = 0; k < dirichlet_components.size(); ++k) {
        is_dir[dirichlet_components[k]] = 1;
        comp_val[dirichlet_components[k]] = dirichlet_values[k];
    }
    EdgeData g(m.boundary_edges.size(), 0.0);
    if (!neumann_g.empty())
        for (size_t e = 0; e < g.size(); ++e)
            if (!is_dir[m.boundary_edges[e].comp]) g[e] = neumann_g[e];
    std::vector<double> load = boundary_load(op, g);
    if (!volume_load.empty())
        for (size_t i = 0; i < load.size(); ++i) load[i] += volume_load[i];
    std::vector<char> pinned(m.num_vertices(), 0);
    std::vector<double> vals(m.num_vertices(), 0.0);
    for (int v = 0; v < m.num_vertices(); ++v) {
        int c = m.node_component[v];
        if (c >= 0 && is_dir[c]) {
            pinned[v] = 1;
            vals[v] = comp_val[c];
        }
    }
    return solve_constrained(op, load, pinned, vals, info);
}

std::vector<double> nodal_residual(const LaplaceOperator& op, const P1Field& field, const std::vector<double>& load) {
    std::vector<double> r = op.matrix() * field;
    if (!load.empty())
        for (size_t i = 0; i < r.size(); ++i) r[i] -= load[i];
    return r;
}

double consistent_flux(const LaplaceOperator& op, const P1Field& field, const std::vector<double>& load, int comp) {
    const auto r = nodal_residual(op, field, load);
    double s = 0;
    for (int v : op.mesh().components[comp].nodes) s += r[v];
    return s;
}

P0Vector gradient(const LaplaceOperator& op, const P1Field& f) {
    const Mesh& m = op.mesh();
    P0Vector g(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[t];
        const auto& gr = op.hat_gradients(t);
        g[t] = gr[0] * f[tri[0]] + gr[1] * f[tri[1]] + gr[2] * f[tri[2]];
    }
    return g;
}

P0Vector perp_gradient(const LaplaceOperator& op, const P1Field& f) {
    P0Vector g = gradient(op, f);
    for (auto& v : g) v = perp(v);
    return g;
}

std::array<P1Field, 2> recover_nodal(const Mesh& m, const P0Vector& v) {
    std::array<P1Field, 2> out{P1Field(m.num_vertices(), 0.0), P1Field(m.num_vertices(), 0.0)};
    std::vector<double> w(m.num_vertices(), 0.0);
    for (int t = 0; t < m.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
            int a = m.triangles[t][k];
            out[0][a] += m.areas[t] * v[t].x;
            out[1][a] += m.areas[t] * v[t].y;
            w[a] += m.areas[t];
        }
    for (int a = 0; a < m.num_vertices(); ++a) {
        out[0][a] /= w[a];
        out[1][a] /= w[a];
    }
    return out;
}

std::vector<Mat2> recovered_gradient(const LaplaceOperator& op, const P0Vector& v) {
    auto nodal = recover_nodal(op.mesh(), v);
    P0Vector gx = gradient(op, nodal[0]);
    P0Vector gy = gradient(op, nodal[1]);
    std::vector<Mat2> out(gx.size());
    for (size_t t = 0; t < gx.size(); ++t) out[t] = Mat2{gx[t].x, gx[t].y, gy[t].x, gy[t].y};
    return out;
}

namespace {

// (sum w_i |f_i|^p)^(1/p) evaluated with max-scaling to avoid overflow at large p.
template <class Weights, class Values>
double weighted_lp(const Weights& w, const Values& f, double p) {
    double fmax = 0;
    for (double x : f) fmax = std::max(fmax, std::abs(x));
    if (std::isinf(p)) return fmax;
    if (fmax == 0) return 0;
    double s = 0;
    for (size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f[i]) / fmax, p);
    return fmax * std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(const Mesh& m, const P0Scalar& f, double p) { return weighted_lp(m.areas, f, p); }

double lp_norm(const Mesh& m, const P0Vector& v, double p) {
    std::vector<double> mag(v.size());
    for (size_t t = 0; t < v.size(); ++t) mag[t] = norm(v[t]);
    return weighted_lp(m.areas, mag, p);
}

double lp_norm_p1(const Mesh& m, const P1Field& f, double p) {
    if (std::isinf(p)) {
        double mx = 0;
        for (double x : f) mx = std::max(mx, std::abs(x));
        return mx;
    }
    std::vector<double> w, vals;
    w.reserve(m.triangles.size() * 3);
    vals.reserve(m.triangles.size() * 3);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[t];
        for (int k = 0; k < 3; ++k) {
            w.push_back(m.areas[t] / 3.0);
            vals.push_back(0.5 * (f[tri[k]] + f[tri[(k + 1) % 3]]));
        }
    }
    return weighted_lp(w, vals, p);
}

double w1p_norm_p1(const LaplaceOperator& op, const P1Field& f, double p) {
    const Mesh& m = op.mesh();
    double a = lp_norm_p1(m, f, p);
    double b = lp_norm(m, gradient(op, f), p);
    if (std::isinf(p)) return std::max(a, b);
    double mx = std::max(a, b);
    if (mx == 0) return 0;
    return mx * std::pow(std::pow(a / mx, p) + std::pow(b / mx, p), 1.0 / p);
}

double w1p_norm_velocity(const LaplaceOperator& op, const P0Vector& v, double p) {
    const Mesh& m = op.mesh();
    double a = lp_norm(m, v, p);
    auto grad = recovered_gradient(op, v);
    std::vector<double> mag(grad.size());
    for (size_t t = 0; t < grad.size(); ++t) mag[t] = std::sqrt(grad[t].frobenius2());
    double b = lp_norm(m, mag, p);
    if (std::isinf(p)) return std::max(a, b);
    double mx = std::max(a, b);
    if (mx == 0) return 0;
    return mx * std::pow(std::pow(a / mx, p) + std::pow(b / mx, p), 1.0 / p);
}

double integrate_p1(const Mesh& m, const P1Field& f) {
    double s = 0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[t];
        s += m.areas[t] * (f[tri[0]] + f[tri[1]] + f[tri[2]]) / 3.0;
    }
    return s;
}

double integrate_p0(const Mesh& m, const P0Scalar& f) {
    double s = 0;
    for (int t = 0; t < m.num_triangles(); ++t) s += m.areas[t] * f[t];
    return s;
}

double tangent_circulation(const Mesh& m, const P0Vector& v, int comp) {
    double s = 0;
    for (int e : m.components[comp].edges) {
        const auto& be = m.boundary_edges[e];
        s += dot(v[be.tri], be.tangent) * be.length;
    }
    return s;
}

void write_vtk(const Mesh& m, const std::string& path, const std::vector<VtkField>& fields) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write VTK file '" + path + "'");
    f << std::setprecision(17);
    f << "# vtk DataFile Version 3.0\neulerss field dump\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << m.num_vertices() << " double\n";
    for (const auto& v : m.vertices) f << v.x << ' ' << v.y << " 0\n";
    f << "CELLS " << m.num_triangles() << ' ' << 4 * m.num_triangles() << '\n';
    for (const auto& t : m.triangles) f << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    f << "CELL_TYPES " << m.num_triangles() << '\n';
    for (int t = 0; t < m.num_triangles(); ++t) f << "5\n";
    auto emit = [&](bool cells) {
        bool header = false;
        for (const auto& fld : fields) {
            if (fld.on_cells != cells) continue;
            if (!header) {
                f << (cells ? "CELL_DATA " : "POINT_DATA ") << (cells ? m.num_triangles() : m.num_vertices()) << '\n';
                header = true;
            }
            if (fld.scalar) {
                f << "SCALARS " << fld.name << " double 1\nLOOKUP_TABLE default\n";
                for (double x : *fld.scalar) f << x << '\n';
            } else if (fld.vector) {
                f << "VECTORS " << fld.name << " double\n";
                for (const auto& v : *fld.vector) f << v.x << ' ' << v.y << " 0\n";
            }
        }
    };
    emit(false);
    emit(true);
}

}  // namespace eulerss
