#pragma once

#include <vector>

#include "eulerss/fem.hpp"

namespace eulerss {

// Auxiliary potential of a twin difference: zero on the outer and outflow components, and
// Neumann data equal to minus the normal derivative of the difference stream function elsewhere,
// imposed variationally.
struct AuxiliaryState {
    P1Field phi;
    P0Vector v;                // perp gradient of phi
    std::vector<double> D;     // flux of phi through each component
    std::vector<double> load;  // right-hand side used at the free nodes
    SolveInfo info;
};

// Components where the auxiliary potential is pinned to zero.
std::vector<char> auxiliary_pinned_components(const Mesh& m);

AuxiliaryState solve_auxiliary(const LaplaceOperator& op, const P1Field& psi_diff, const P0Scalar& omega_diff,
                               const P1Field* initial_guess = nullptr);

// Largest |A phi - load| over free nodes; the discrete variational identity.
double auxiliary_residual(const LaplaceOperator& op, const AuxiliaryState& aux);

struct RgfResidual {
    int comp = -1;
    double residual = 0;   // |D_i + C_i|
};

// Residuals for every inflow component.
std::vector<RgfResidual> verify_rgf(const Mesh& m, const AuxiliaryState& aux, const std::vector<double>& circulation_diff);

}  // namespace eulerss
