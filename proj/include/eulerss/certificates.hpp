#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "eulerss/transport.hpp"
#include "eulerss/zaremba.hpp"

namespace eulerss {

// ---------------------------------------------------------------- difference stream

struct DifferenceStream {
    P1Field psi;                       // G[omega_a - omega_b] + sum psi_i f^i
    std::vector<double> psi_const;     // per component, entry 0 is 0
    std::vector<double> circulation;   // C_a - C_b per component
    P0Vector u;                        // perp gradient of psi
};

// Rebuilds the stream function of the difference of two states on the same setup from the
// difference vorticity and the difference circulations. Throws ConfigError on size mismatch.
DifferenceStream difference_stream(const FlowSetup& setup, const SimState& a, const SimState& b);

// Largest |integral(u . grad hat_a) - integral_boundary(g hat_a)| over boundary nodes: the weak
// normal trace of a P0 field tested against g.
double weak_normal_trace_residual(const LaplaceOperator& op, const P0Vector& u, const EdgeData& g);

// Largest relative violation of ||w||_{2p/(p-1)} <= ||w||_inf^{1/p} ||w||_2^{(p-1)/p} over p (negative when it holds).
double interpolation_defect(const Mesh& m, const P0Vector& w, const std::vector<double>& p_grid);

// ---------------------------------------------------------------- Lamb identity

// Integrals of the Lamb-type identity for divergence-free u, v:
//   lhs = bnd_uv_wn - bnd_uw_vn - bnd_vw_un
//   rhs = vol_uv_divw - vol_curlu - vol_curlv - vol_u_vgradw - vol_v_ugradw
struct LambTerms {
    double bnd_uv_wn = 0, bnd_uw_vn = 0, bnd_vw_un = 0;
    double vol_uv_divw = 0;
    double vol_curlu = 0;   // int curl(u) v_perp . w
    double vol_curlv = 0;   // int curl(v) u_perp . w
    double vol_u_vgradw = 0;   // int u . ((v . grad) w)
    double vol_v_ugradw = 0;   // int v . ((u . grad) w)
    double lhs = 0, rhs = 0, residual = 0;
    double divergence_defect = 0;   // weak divergence of u and v at interior nodes (discrete variant)
};

struct AnalyticField {
    std::function<Vec2(Vec2)> value;
    std::function<double(Vec2)> curl;
    std::function<Mat2(Vec2)> grad;   // row i = gradient of component i
};

// Quadrature evaluation: 6-point triangle rule, 3-point Gauss on boundary edges.
LambTerms lamb_check(const Mesh& m, const AnalyticField& u, const AnalyticField& v, const AnalyticField& w);
// Discrete fields: P0 values and curls, gradient of w from nodal recovery, traces from the boundary cell.
LambTerms lamb_check(const LaplaceOperator& op, const P0Vector& u, const P0Scalar& curl_u, const P0Vector& v,
                     const P0Scalar& curl_v, const P0Vector& w);

// ---------------------------------------------------------------- trace inequality

struct TraceReport {
    double lhs = 0;          // boundary integral of the squared normal derivative
    double tangential = 0;   // boundary integral of the squared tangential derivative
    double energy = 0;       // Dirichlet energy
    double c_required = 0;   // max(0, lhs - tangential) / energy
};

// h must be discretely harmonic at interior nodes; throws PreconditionError otherwise.
TraceReport trace_inequality_check(const LaplaceOperator& op, const P1Field& h, int comp);

struct TraceFamilyReport {
    double max_c = 0;
    double mean_c = 0;
    int samples = 0;
};

// Harmonic extensions of random low-mode Fourier data on every component (seeded, reproducible).
TraceFamilyReport trace_inequality_family(const LaplaceOperator& op, int comp, int samples, int modes,
                                          unsigned seed);

// ---------------------------------------------------------------- twin ledger

struct LedgerRow {
    double t0 = 0, t1 = 0;
    int steps = 0;
    // energy identity
    double kinetic_jump = 0;   // 1/2 [||u~||^2]
    double boundary = 0;       // 1/2 int int |u~|^2 g
    double convective = 0;     // int int u~ . ((u~ . grad) u^)
    double energy_residual = 0;
    // auxiliary identity
    double aux_kinetic_jump = 0;     // 1/2 [||v~||^2]
    double inflow = 0;               // int int_in |u~|^2 (-g)
    double outflow_coupling = 0;     // int int_out (u~ . v~)(-g)
    double inflow_coupling = 0;      // int int_in (u~ . u^)(v~ . n)
    double trilinear = 0;            // int int u~ . ((v~ . grad) u^) + v~ . ((u~ . grad) u^)
    double vorticity_coupling = 0;   // int int w^ u~ . v~_perp
    double circulation_term = 0;     // int sum psi~_i' D~_i
    double inflow_vorticity = 0;     // int int_in phi~ w~_in g
    double aux_residual = 0;
    // integrals feeding the inequalities
    double outflow_energy = 0;       // int int_out |u~|^2 g
    double u2_int = 0, v2_int = 0, z_int = 0;
    std::vector<double> u_pow_int, v_pow_int, z_pow_int;   // per p: int ||.||^{2(p-1)/p}
    double boundary_abs = 0;         // int int |u~|^2 |g|
    double psi_prime_sq = 0;         // sum_i int |psi~_i'|^2
    double omega_in_sup2 = 0;        // sup over [0, t1] of |w~_in|^2 on the support of g
    double z0 = 0, z1 = 0;
};

struct TwinSample {
    double t = 0;
    double u2 = 0, v2 = 0, z = 0;   // squared L2 norms, z = u2 + v2
    double u_inf = 0;
    double convective = 0;
    std::vector<double> psi_const, D, circulation;
    double rgf_max = 0;           // max over inflow components of |D~_i + C~_i|
    double aux_residual = 0;      // discrete variational residual of the auxiliary problem
    double normal_trace = 0;      // weak normal trace residual of u~ against 0
    double interpolation = 0;     // interpolation_defect of u~ and v~
};

struct TwinReport {
    std::vector<double> p_grid;
    std::vector<LedgerRow> rows;        // one per snapshot interval
    std::vector<TwinSample> samples;    // at every snapshot, including t = 0
    double circulation0_sq = 0;         // sum over inflow components of |C~_{i,0}|^2
    int step_count = 0;
};

// Advances both runs in lockstep and accumulates every ledger term per step (trapezoid in time).
TwinReport certify_twins(Simulation& a, Simulation& b, double T, int snapshots,
                         const std::vector<double>& p_grid = {2, 4, 8, 16, 32});

// ---------------------------------------------------------------- inequality ledger

struct InequalityReport {
    std::vector<double> p_grid;
    double c_energy = 0;   // energy inequality
    double c_aux = 0;      // auxiliary inequality
    double c_tag = 0;      // combined estimate
    double c_z = 0;        // growth inequality for z = ||u~||^2 + ||v~||^2 (constant used by the Osgood bound)
    double c_convective = 0;   // max |convective| / (p ||u~||^{2(p-1)/p}) over samples and p
    int flags = 0;         // intervals/p where an inequality fails with 1.01 * constant
    double psi_prime_lhs = 0, psi_prime_rhs = 0;
};

InequalityReport inequality_ledger(const TwinReport& twin);

void write_ledger_csv(std::ostream& out, const TwinReport& twin);

}  // namespace eulerss
