#pragma once

#include <array>
#include <string>
#include <vector>

#include "eulerss/mesh.hpp"
#include "eulerss/sparse.hpp"

namespace eulerss {

// Field representations: plain value vectors indexed by vertex (P1) or triangle (P0).
using P1Field = std::vector<double>;
using P0Scalar = std::vector<double>;
using P0Vector = std::vector<Vec2>;
// One value per boundary edge (index into Mesh::boundary_edges), e.g. normal velocity g.
using EdgeData = std::vector<double>;

// P1 stiffness operator (weak form of -Laplace) plus the per-triangle data the kernels reuse.
class LaplaceOperator {
public:
    explicit LaplaceOperator(const Mesh& m);

    const Mesh& mesh() const { return *mesh_; }
    const CsrMatrix& matrix() const { return A_; }
    // Gradients of the three barycentric hat functions on triangle t (constant per triangle).
    const std::array<Vec2, 3>& hat_gradients(int t) const { return grads_[t]; }
    // Lumped nodal mass: integral of each hat function.
    const std::vector<double>& node_mass() const { return node_mass_; }

private:
    const Mesh* mesh_;
    CsrMatrix A_;
    std::vector<std::array<Vec2, 3>> grads_;
    std::vector<double> node_mass_;
};

LaplaceOperator assemble_stiffness(const Mesh& m);

struct SolveInfo {
    int iterations = 0;
    double relative_residual = 0;
};

// Load vector for Laplace(psi) = omega in the convention A psi = load: load_a = -integral(omega * hat_a).
std::vector<double> vorticity_load(const LaplaceOperator& op, const P0Scalar& omega);
// Plain P0 mass pairing: integral(f * hat_a).
std::vector<double> mass_pairing(const LaplaceOperator& op, const P0Scalar& f);
// Boundary load: integral over the boundary of g * hat_a, g constant per edge (trapezoid, exact).
std::vector<double> boundary_load(const LaplaceOperator& op, const EdgeData& g);

// Solve A u = load at free nodes with u pinned where mask[a] != 0.
P1Field solve_constrained(const LaplaceOperator& op, const std::vector<double>& load, const std::vector<char>& pinned,
                          const std::vector<double>& pinned_values, SolveInfo* info = nullptr,
                          const P1Field* initial_guess = nullptr);

// Every boundary node pinned to its component's value.
P1Field solve_dirichlet(const LaplaceOperator& op, const std::vector<double>& load,
                        const std::vector<double>& component_values, SolveInfo* info = nullptr,
                        const P1Field* initial_guess = nullptr);
// Every boundary node pinned to trace[a].
P1Field solve_dirichlet_trace(const LaplaceOperator& op, const std::vector<double>& load, const P1Field& trace,
                              SolveInfo* info = nullptr);

// Mean-zero solution of integral(grad phi . grad chi) = boundary integral(g chi).
P1Field solve_neumann(const LaplaceOperator& op, const EdgeData& g, SolveInfo* info = nullptr);

// Dirichlet values on the listed components; Neumann data g (per boundary edge) on the rest.
P1Field solve_mixed(const LaplaceOperator& op, const std::vector<int>& dirichlet_components,
                    const std::vector<double>& dirichlet_values, const EdgeData& neumann_g,
                    const std::vector<double>& volume_load = {}, SolveInfo* info = nullptr);

// Variational boundary flux: (A field - load) summed over the component's nodes.
double consistent_flux(const LaplaceOperator& op, const P1Field& field, const std::vector<double>& load, int comp);
// Same residual restricted to one node.
std::vector<double> nodal_residual(const LaplaceOperator& op, const P1Field& field, const std::vector<double>& load);

P0Vector gradient(const LaplaceOperator& op, const P1Field& f);
P0Vector perp_gradient(const LaplaceOperator& op, const P1Field& f);

// Area-weighted nodal average of a P0 vector field (gradient recovery).
std::array<P1Field, 2> recover_nodal(const Mesh& m, const P0Vector& v);
// Per-triangle gradient of the recovered field: rows are components of v.
std::vector<Mat2> recovered_gradient(const LaplaceOperator& op, const P0Vector& v);

// Norms. p = infinity is accepted. P0 data integrated exactly, P1 data with the mid-edge rule.
double lp_norm(const Mesh& m, const P0Scalar& f, double p);
double lp_norm(const Mesh& m, const P0Vector& v, double p);
double lp_norm_p1(const Mesh& m, const P1Field& f, double p);
// (||f||_p^p + ||grad f||_p^p)^(1/p) for P1 data.
double w1p_norm_p1(const LaplaceOperator& op, const P1Field& f, double p);
// Same proxy for a P0 velocity, with the gradient taken from nodal recovery.
double w1p_norm_velocity(const LaplaceOperator& op, const P0Vector& v, double p);

// Integral of a P1 field over the domain (exact).
double integrate_p1(const Mesh& m, const P1Field& f);
double integrate_p0(const Mesh& m, const P0Scalar& f);

// Sum over boundary edges of component comp: (v . tangent) * length.
double tangent_circulation(const Mesh& m, const P0Vector& v, int comp);

// VTK legacy ASCII dump.
struct VtkField {
    std::string name;
    const std::vector<double>* scalar = nullptr;
    const std::vector<Vec2>* vector = nullptr;
    bool on_cells = false;
};
void write_vtk(const Mesh& m, const std::string& path, const std::vector<VtkField>& fields);

}  // namespace eulerss
