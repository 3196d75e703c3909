#include "eulerss/hodge.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace eulerss {

HarmonicBasis compute_harmonic_basis(const LaplaceOperator& op) {
    const Mesh& m = op.mesh();
    const int nc = m.num_components();
    if (nc < 2) throw PreconditionError("harmonic basis requires at least one inner boundary component");
    HarmonicBasis hb;
    const std::vector<double> no_load(m.num_vertices(), 0.0);
    for (int c = 1; c < nc; ++c) {
        hb.inner.push_back(c);
        std::vector<double> bc(nc, 0.0);
        bc[c] = 1.0;
        hb.fields.push_back(solve_dirichlet(op, no_load, bc));
    }
    const int n = hb.size();
    // Nodal residuals give every flux at once: flux of field l through comp c = sum over comp nodes.
    std::vector<std::vector<double>> comp_flux(n, std::vector<double>(nc, 0.0));
    for (int l = 0; l < n; ++l) {
        auto r = nodal_residual(op, hb.fields[l], {});
        for (int c = 0; c < nc; ++c)
            for (int v : m.components[c].nodes) comp_flux[l][c] += r[v];
    }
    hb.flux.assign(n, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) hb.flux[k][l] = comp_flux[l][hb.inner[k]];

    // The outer field 1 - sum f^l is evaluated explicitly so the row-sum check is not circular.
    P1Field outer_field(m.num_vertices(), 1.0);
    for (int l = 0; l < n; ++l)
        for (int a = 0; a < m.num_vertices(); ++a) outer_field[a] -= hb.fields[l][a];
    auto r0 = nodal_residual(op, outer_field, {});
    hb.flux_extended.assign(nc, std::vector<double>(nc, 0.0));
    for (int c = 0; c < nc; ++c) {
        for (int l = 0; l < n; ++l) hb.flux_extended[c][hb.inner[l]] = comp_flux[l][c];
        for (int v : m.components[c].nodes) hb.flux_extended[c][0] += r0[v];
    }

    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            double a = hb.flux[k][l], b = hb.flux[l][k];
            if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
                throw SolverError("flux matrix is not symmetric; check the harmonic solves");
        }
        double off = 0;
        for (int l = 0; l < n; ++l)
            if (l != k) off += std::abs(hb.flux[k][l]);
        if (!(std::abs(hb.flux[k][k]) > off + 1e-8 * std::abs(hb.flux[k][k])))
            throw SolverError("flux matrix is not strictly diagonally dominant (component " +
                              std::to_string(hb.inner[k]) + ")");
    }
    return hb;
}

std::vector<double> solve_flux_system(const HarmonicBasis& basis, const std::vector<double>& rhs) {
    const int n = basis.size();
    if (n == 0) return {};
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd b(n);
    for (int k = 0; k < n; ++k) {
        b(k) = rhs[k];
        for (int l = 0; l < n; ++l) M(k, l) = basis.flux[k][l];
    }
    Eigen::VectorXd x = M.partialPivLu().solve(b);
    return {x.data(), x.data() + n};
}

DualBasis compute_dual_basis(const HarmonicBasis& basis) {
    const int n = basis.size();
    DualBasis db;
    db.coeff.assign(n, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k) {
        std::vector<double> rhs(n, 0.0);
        rhs[k] = -1.0;
        db.coeff[k] = solve_flux_system(basis, rhs);
        P1Field g(basis.fields[0].size(), 0.0);
        for (int l = 0; l < n; ++l)
            for (size_t a = 0; a < g.size(); ++a) g[a] += db.coeff[k][l] * basis.fields[l][a];
        db.fields.push_back(std::move(g));
    }
    return db;
}

void validate_boundary_flux(const Mesh& m, const EdgeData& g) {
    if (g.size() != m.boundary_edges.size())
        throw ConfigError("boundary flux must have one value per boundary edge");
    constexpr double tol = 1e-12;
    for (size_t e = 0; e < g.size(); ++e) {
        const auto& be = m.boundary_edges[e];
        Role r = m.components[be.comp].role;
        bool bad = (r == Role::Inflow && g[e] > tol) || (r == Role::Outflow && g[e] < -tol) ||
                   (r == Role::Wall && std::abs(g[e]) > tol);
        if (bad) {
            std::ostringstream msg;
            msg << std::setprecision(17) << "sign condition violated on boundary edge " << e << " (vertices " << be.a
                << "-" << be.b << ", component " << be.comp << ", " << role_name(r) << "): g = " << g[e];
            throw PreconditionError(msg.str());
        }
    }
}

VelocitySolver::VelocitySolver(const LaplaceOperator& op, const HarmonicBasis& basis, EdgeData g)
    : op_(&op), basis_(&basis), g_(std::move(g)) {
    validate_boundary_flux(op.mesh(), g_);
    potential_ = solve_neumann(op, g_);
    potential_u_ = gradient(op, potential_);
}

VelocityAssembly VelocitySolver::reconstruct(const P0Scalar& omega, const std::vector<double>& circulations,
                                             const P1Field* green_guess) const {
    const LaplaceOperator& op = *op_;
    const Mesh& m = op.mesh();
    const int nc = m.num_components();
    if (static_cast<int>(circulations.size()) != nc)
        throw ConfigError("one circulation per boundary component required");
    VelocityAssembly va;
    va.green_load = vorticity_load(op, omega);
    va.green = solve_dirichlet(op, va.green_load, std::vector<double>(nc, 0.0), nullptr, green_guess);
    va.potential = potential_;
    const HarmonicBasis& hb = *basis_;
    std::vector<double> rhs(hb.size());
    for (int k = 0; k < hb.size(); ++k)
        rhs[k] = circulations[hb.inner[k]] - consistent_flux(op, va.green, va.green_load, hb.inner[k]);
    std::vector<double> x = solve_flux_system(hb, rhs);
    va.psi.assign(nc, 0.0);
    va.stream = va.green;
    for (int k = 0; k < hb.size(); ++k) {
        va.psi[hb.inner[k]] = x[k];
        for (size_t a = 0; a < va.stream.size(); ++a) va.stream[a] += x[k] * hb.fields[k][a];
    }
    va.u = perp_gradient(op, va.stream);
    for (size_t t = 0; t < va.u.size(); ++t) va.u[t] += potential_u_[t];
    return va;
}

VelocityAssembly reconstruct_velocity(const LaplaceOperator& op, const HarmonicBasis& basis, const P0Scalar& omega,
                                      const EdgeData& g, const std::vector<double>& circulations) {
    VelocitySolver vs(op, basis, g);
    return vs.reconstruct(omega, circulations);
}

double consistent_circulation(const LaplaceOperator& op, const VelocityAssembly& va, int comp) {
    return consistent_flux(op, va.stream, va.green_load, comp);
}

GrowthReport check_elliptic_growth(const LaplaceOperator& op, const VelocityAssembly& va, const P0Scalar& omega,
                                   const EdgeData& g, const std::vector<double>& circulations,
                                   const std::vector<double>& p_grid) {
    const Mesh& m = op.mesh();
    GrowthReport rep;
    double gmax = 0;
    for (double x : g) gmax = std::max(gmax, std::abs(x));
    double csum = 0;
    for (int c = 1; c < m.num_components(); ++c) csum += std::abs(circulations[c]);
    for (double p : p_grid) {
        double num = w1p_norm_velocity(op, va.u, p);
        double den = p * (lp_norm(m, omega, p) + gmax + csum);
        rep.p.push_back(p);
        rep.ratio.push_back(den > 0 ? num / den : 0.0);
    }
    if (!rep.ratio.empty()) {
        double ref = rep.ratio.front();
        for (double r : rep.ratio)
            if (r > 2.0 * ref) rep.bounded = false;
    }
    return rep;
}

}  // namespace eulerss
