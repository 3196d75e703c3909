#include "eulerss/zaremba.hpp"

#include <algorithm>
#include <cmath>

namespace eulerss {

std::vector<char> auxiliary_pinned_components(const Mesh& m) {
    std::vector<char> pinned(m.num_components(), 0);
    pinned[0] = 1;
    for (int c = 1; c < m.num_components(); ++c) pinned[c] = m.components[c].role == Role::Outflow;
    return pinned;
}

AuxiliaryState solve_auxiliary(const LaplaceOperator& op, const P1Field& psi_diff, const P0Scalar& omega_diff,
                               const P1Field* initial_guess) {
    const Mesh& m = op.mesh();
    if (static_cast<int>(psi_diff.size()) != m.num_vertices() ||
        static_cast<int>(omega_diff.size()) != m.num_triangles())
        throw ConfigError("auxiliary problem: field sizes do not match the mesh");
    auto pinned_comp = auxiliary_pinned_components(m);
    std::vector<char> pinned(m.num_vertices(), 0);
    for (int a = 0; a < m.num_vertices(); ++a) {
        int c = m.node_component[a];
        if (c >= 0 && pinned_comp[c]) pinned[a] = 1;
    }
    AuxiliaryState aux;
    // Weak form: (grad phi, grad chi) = -(grad psi, grad chi) - (omega, chi).
    aux.load = op.matrix() * psi_diff;
    auto mp = mass_pairing(op, omega_diff);
    for (int a = 0; a < m.num_vertices(); ++a) aux.load[a] = -aux.load[a] - mp[a];
    aux.phi = solve_constrained(op, aux.load, pinned, std::vector<double>(m.num_vertices(), 0.0), &aux.info,
                                initial_guess);
    aux.v = perp_gradient(op, aux.phi);
    // phi is harmonic, so its flux is the plain residual with zero load.
    auto r = nodal_residual(op, aux.phi, {});
    aux.D.assign(m.num_components(), 0.0);
    for (int c = 0; c < m.num_components(); ++c)
        for (int a : m.components[c].nodes) aux.D[c] += r[a];
    return aux;
}

double auxiliary_residual(const LaplaceOperator& op, const AuxiliaryState& aux) {
    const Mesh& m = op.mesh();
    auto pinned_comp = auxiliary_pinned_components(m);
    auto r = nodal_residual(op, aux.phi, aux.load);
    double worst = 0;
    for (int a = 0; a < m.num_vertices(); ++a) {
        int c = m.node_component[a];
        if (c >= 0 && pinned_comp[c]) continue;
        worst = std::max(worst, std::abs(r[a]));
    }
    return worst;
}

std::vector<RgfResidual> verify_rgf(const Mesh& m, const AuxiliaryState& aux, const std::vector<double>& circulation_diff) {
    std::vector<RgfResidual> out;
    for (int c : m.components_with_role(Role::Inflow))
        out.push_back({c, std::abs(aux.D[c] + circulation_diff[c])});
    return out;
}

}  // namespace eulerss
