#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eulerss/hodge.hpp"

namespace eulerss {

// ---------------------------------------------------------------- scenario

struct AnnulusSpec {
    double r0 = 1.0, r1 = 2.0;
    int nr = 8, ntheta = 64;
    Role inner_role = Role::Wall;
    Role outer_role = Role::Wall;
};

struct MeshSource {
    std::optional<AnnulusSpec> annulus;
    std::string path;   // used when annulus is empty
    int refine = 0;
};

// Normal velocity on one component. Constant: g = value. Flux: g = value / component length.
// Table: piecewise linear in normalized arclength s in [0, 1), periodic.
struct BoundaryProfile {
    enum class Kind { Constant, Flux, Table };
    int comp = -1;
    Kind kind = Kind::Constant;
    double value = 0;
    std::vector<double> s, values;
};

struct VorticityProfile {
    enum class Kind { Constant, Band, HalfPlane, Gaussian, File };
    Kind kind = Kind::Constant;
    double value = 0;         // constant value, band/halfplane value, gaussian amplitude
    double background = 0;    // outside the band / half plane
    double r_min = 0, r_max = 0;
    Vec2 center{0, 0};
    Vec2 normal{1, 0};
    double offset = 0;
    double width = 1;
    std::string path;
    double shift = 0;         // added everywhere (perturbation hook)
};

struct InflowValue {
    int comp = -1;   // -1: every inflow component
    double value = 0;
    std::vector<std::pair<double, double>> table;   // (t, value), piecewise linear, clamped
    double at(double t) const;
};

struct Scenario {
    MeshSource mesh;
    std::vector<BoundaryProfile> g;
    double g_scale = 1.0;
    VorticityProfile omega0;
    std::vector<InflowValue> omega_in;
    double omega_in_shift = 0;
    std::vector<double> C0;   // per component; empty means zero
    double T = 0;
    double cfl = 0.5;
    int snapshots = 10;
    std::string base_dir = ".";
};

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

Mesh build_scenario_mesh(const Scenario& sc);
EdgeData scenario_boundary_flux(const Mesh& m, const Scenario& sc);
P0Scalar scenario_initial_vorticity(const Mesh& m, const Scenario& sc);
std::vector<double> scenario_initial_circulations(const Mesh& m, const Scenario& sc);
double scenario_inflow_vorticity(const Scenario& sc, int comp, double t);

// ---------------------------------------------------------------- discretization shared by runs

// Everything that depends only on the mesh and g: operator, harmonic basis, potential flow and
// its exactly divergence-free edge fluxes. Immutable; shared between twin runs.
class FlowSetup {
public:
    FlowSetup(Mesh mesh, EdgeData g);
    FlowSetup(const FlowSetup&) = delete;
    FlowSetup& operator=(const FlowSetup&) = delete;

    const Mesh& mesh() const { return mesh_; }
    const LaplaceOperator& op() const { return *op_; }
    const HarmonicBasis& basis() const { return basis_; }
    const VelocitySolver& velocity() const { return *velocity_; }
    const EdgeData& g() const { return velocity_->g(); }
    // Flux of the potential part across each interior edge, oriented from left to right.
    const std::vector<double>& potential_flux() const { return potential_flux_; }

private:
    Mesh mesh_;
    std::unique_ptr<LaplaceOperator> op_;
    HarmonicBasis basis_;
    std::unique_ptr<VelocitySolver> velocity_;
    std::vector<double> potential_flux_;
};

std::shared_ptr<const FlowSetup> make_flow_setup(const Scenario& sc);

// ---------------------------------------------------------------- time stepping

using InflowFunction = std::function<double(int comp, double t)>;

struct SimState {
    double t = 0;
    P0Scalar omega;
    std::vector<double> C;       // circulation per component
    VelocityAssembly velocity;   // reconstructed from (omega, C)
    EdgeData trace;              // boundary vorticity used in the step that produced this state
    double last_dt = 0;
};

struct StepInfo {
    double t0 = 0, dt = 0;
    EdgeData trace;               // upwind value per boundary edge
    double mass_change = 0;       // sum |T| (omega_new - omega_old)
    double boundary_transport = 0;   // dt * sum over boundary edges of F_e * trace_e
};

class Simulation {
public:
    Simulation(std::shared_ptr<const FlowSetup> setup, P0Scalar omega0, std::vector<double> C0,
               InflowFunction omega_in, double cfl);

    const SimState& state() const { return state_; }
    const FlowSetup& setup() const { return *setup_; }
    // Largest step satisfying the CFL rule and the positivity bound of the upwind update.
    double stable_dt() const;
    StepInfo advance(double dt);
    // Edge fluxes of the current velocity: interior edges oriented left to right, boundary edges outward.
    std::vector<double> interior_flux() const;
    EdgeData boundary_flux() const;

private:
    std::shared_ptr<const FlowSetup> setup_;
    InflowFunction omega_in_;
    double cfl_;
    SimState state_;
};

Simulation make_simulation(std::shared_ptr<const FlowSetup> setup, const Scenario& sc);

struct Trajectory {
    std::vector<SimState> snapshots;
    std::vector<SimState> steps;   // every step state when recording is enabled
    int step_count = 0;
};

struct RunOptions {
    bool record_steps = false;
    // Called after every step, for every run in a lockstep group: (run index, state before, step, state after).
    std::function<void(int, const SimState&, const StepInfo&, const SimState&)> on_step;
};

// Advances several runs with a common step (the minimum of their stable steps) so snapshots align.
std::vector<Trajectory> run_lockstep(std::vector<Simulation*> sims, double T, int snapshots,
                                     const RunOptions& opts = {});
Trajectory run(const Scenario& sc, const RunOptions& opts = {});

double kinetic_energy(const Mesh& m, const P0Vector& u);

// LHS - RHS of the weak transport identity for a time-independent test function phi over [t0, t1],
// evaluated on recorded step states (volume terms by trapezoid, boundary terms per step).
double weak_residual(const Trajectory& traj, const FlowSetup& setup, const P1Field& phi, double t0, double t1);

void write_trajectory_csv(std::ostream& out, const Mesh& m, const Trajectory& traj);

}  // namespace eulerss
