#pragma once

#include <vector>

#include "eulerss/fem.hpp"

namespace eulerss {

// Harmonic functions equal to 1 on one inner component and 0 on every other component.
struct HarmonicBasis {
    std::vector<int> inner;              // component ids, in increasing order (all components except 0)
    std::vector<P1Field> fields;         // fields[k] belongs to component inner[k]
    // flux[k][l] = consistent flux of fields[l] through component inner[k].
    std::vector<std::vector<double>> flux;
    // Same matrix over all components, with the outer field 1 - sum(fields) included as index 0.
    std::vector<std::vector<double>> flux_extended;

    int size() const { return static_cast<int>(inner.size()); }
};

HarmonicBasis compute_harmonic_basis(const LaplaceOperator& op);

// Combinations of the harmonic basis with unit negative flux through one component.
struct DualBasis {
    std::vector<P1Field> fields;
    // coeff[k][l]: value of fields[k] on component inner[l] (zero on the outer component).
    std::vector<std::vector<double>> coeff;
};

DualBasis compute_dual_basis(const HarmonicBasis& basis);

// Solves flux * x = rhs for the small dense flux system (size of the inner set).
std::vector<double> solve_flux_system(const HarmonicBasis& basis, const std::vector<double>& rhs);

// Checks compatibility and the sign condition on g (per boundary edge); throws PreconditionError.
void validate_boundary_flux(const Mesh& m, const EdgeData& g);

struct VelocityAssembly {
    P1Field green;                  // Dirichlet solution of Laplace(G) = omega, G = 0 on the boundary
    std::vector<double> green_load; // load vector used for G, reused by flux evaluations
    P1Field potential;              // Neumann potential carrying the boundary flux g
    std::vector<double> psi;        // boundary constants per component, psi[0] = 0
    P1Field stream;                 // green + sum psi_i f^i
    P0Vector u;                     // grad(potential) + perp grad(stream)
};

// Reconstruction of the velocity from vorticity, boundary flux and circulations.
// The potential part only depends on g, so it is computed once.
class VelocitySolver {
public:
    VelocitySolver(const LaplaceOperator& op, const HarmonicBasis& basis, EdgeData g);

    // circulations: one entry per component; entry 0 is not used (the outer stream value is the gauge).
    VelocityAssembly reconstruct(const P0Scalar& omega, const std::vector<double>& circulations,
                                 const P1Field* green_guess = nullptr) const;

    const LaplaceOperator& op() const { return *op_; }
    const HarmonicBasis& basis() const { return *basis_; }
    const EdgeData& g() const { return g_; }
    const P1Field& potential() const { return potential_; }
    const P0Vector& potential_velocity() const { return potential_u_; }

private:
    const LaplaceOperator* op_;
    const HarmonicBasis* basis_;
    EdgeData g_;
    P1Field potential_;
    P0Vector potential_u_;
};

VelocityAssembly reconstruct_velocity(const LaplaceOperator& op, const HarmonicBasis& basis, const P0Scalar& omega,
                                      const EdgeData& g, const std::vector<double>& circulations);

// Circulation of the reconstructed flow around a component, two ways.
double consistent_circulation(const LaplaceOperator& op, const VelocityAssembly& va, int comp);

struct GrowthReport {
    std::vector<double> p;
    std::vector<double> ratio;
    bool bounded = true;   // every ratio <= 2 * ratio at p = 2
};

GrowthReport check_elliptic_growth(const LaplaceOperator& op, const VelocityAssembly& va, const P0Scalar& omega,
                                   const EdgeData& g, const std::vector<double>& circulations,
                                   const std::vector<double>& p_grid = {2, 4, 8, 16, 32});

}  // namespace eulerss
