#include "eulerss/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <sstream>

namespace eulerss {

namespace {

// Cell-graph Laplacian with two-point weights, used to project averaged edge fluxes onto
// exactly divergence-free ones.
CsrMatrix cell_graph_laplacian(const Mesh& m, std::vector<double>& weights) {
    std::vector<Triplet> trip;
    weights.resize(m.interior_edges.size());
    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        double w = ie.length / norm(m.centroids[ie.right] - m.centroids[ie.left]);
        weights[e] = w;
        trip.push_back({ie.left, ie.left, w});
        trip.push_back({ie.right, ie.right, w});
        trip.push_back({ie.left, ie.right, -w});
        trip.push_back({ie.right, ie.left, -w});
    }
    return CsrMatrix::from_triplets(m.num_triangles(), std::move(trip));
}

std::vector<double> cell_divergence(const Mesh& m, const std::vector<double>& interior, const EdgeData& boundary) {
    std::vector<double> div(m.num_triangles(), 0.0);
    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        div[m.interior_edges[e].left] += interior[e];
        div[m.interior_edges[e].right] -= interior[e];
    }
    for (size_t b = 0; b < m.boundary_edges.size(); ++b) div[m.boundary_edges[b].tri] += boundary[b];
    return div;
}

// Pushes the remaining per-cell divergence along a breadth-first spanning tree into the root cell.
void tree_correction(const Mesh& m, std::vector<double>& interior, std::vector<double> div) {
    const int nt = m.num_triangles();
    std::vector<std::vector<int>> cell_edges(nt);
    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        cell_edges[m.interior_edges[e].left].push_back(static_cast<int>(e));
        cell_edges[m.interior_edges[e].right].push_back(static_cast<int>(e));
    }
    std::vector<int> parent_edge(nt, -2), order;
    order.reserve(nt);
    std::deque<int> queue{0};
    parent_edge[0] = -1;
    while (!queue.empty()) {
        int t = queue.front();
        queue.pop_front();
        order.push_back(t);
        for (int e : cell_edges[t]) {
            const auto& ie = m.interior_edges[e];
            int nb = ie.left == t ? ie.right : ie.left;
            if (parent_edge[nb] != -2) continue;
            parent_edge[nb] = e;
            queue.push_back(nb);
        }
    }
    if (static_cast<int>(order.size()) != nt) throw MeshError("triangle adjacency graph is not connected");
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int t = *it;
        int e = parent_edge[t];
        if (e < 0) continue;
        const auto& ie = m.interior_edges[e];
        double r = div[t];
        int parent;
        if (ie.left == t) {
            interior[e] -= r;
            parent = ie.right;
        } else {
            interior[e] += r;
            parent = ie.left;
        }
        div[parent] += r;
        div[t] = 0;
    }
}

}  // namespace

FlowSetup::FlowSetup(Mesh mesh, EdgeData g) : mesh_(std::move(mesh)) {
    op_ = std::make_unique<LaplaceOperator>(mesh_);
    if (mesh_.num_components() >= 2) basis_ = compute_harmonic_basis(*op_);
    velocity_ = std::make_unique<VelocitySolver>(*op_, basis_, std::move(g));

    const Mesh& m = mesh_;
    const auto& gu = velocity_->potential_velocity();
    potential_flux_.resize(m.interior_edges.size());
    for (size_t e = 0; e < m.interior_edges.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        potential_flux_[e] = dot((gu[ie.left] + gu[ie.right]) * 0.5, ie.normal) * ie.length;
    }
    EdgeData bflux(m.boundary_edges.size());
    for (size_t b = 0; b < bflux.size(); ++b) bflux[b] = velocity_->g()[b] * m.boundary_edges[b].length;

    auto div = cell_divergence(m, potential_flux_, bflux);
    double scale = 0;
    for (double d : div) scale = std::max(scale, std::abs(d));
    if (scale > 0) {
        std::vector<double> w;
        CsrMatrix L = cell_graph_laplacian(m, w);
        std::vector<double> p(m.num_triangles(), 0.0);
        CgOptions opts;
        opts.rtol = 1e-12;
        opts.deflate_constant = true;
        opts.max_iterations = 100 + static_cast<int>(60 * std::sqrt(static_cast<double>(m.num_triangles())));
        pcg(L, div, p, opts);
        for (size_t e = 0; e < m.interior_edges.size(); ++e) {
            const auto& ie = m.interior_edges[e];
            potential_flux_[e] += w[e] * (p[ie.right] - p[ie.left]);
        }
        tree_correction(m, potential_flux_, cell_divergence(m, potential_flux_, bflux));
    }
}

std::shared_ptr<const FlowSetup> make_flow_setup(const Scenario& sc) {
    Mesh m = build_scenario_mesh(sc);
    EdgeData g = scenario_boundary_flux(m, sc);
    return std::make_shared<FlowSetup>(std::move(m), std::move(g));
}

Simulation::Simulation(std::shared_ptr<const FlowSetup> setup, P0Scalar omega0, std::vector<double> C0,
                       InflowFunction omega_in, double cfl)
    : setup_(std::move(setup)), omega_in_(std::move(omega_in)), cfl_(cfl) {
    const Mesh& m = setup_->mesh();
    if (static_cast<int>(omega0.size()) != m.num_triangles())
        throw ConfigError("initial vorticity must have one value per triangle");
    if (static_cast<int>(C0.size()) != m.num_components())
        throw ConfigError("initial circulations must have one value per boundary component");
    if (!(cfl > 0 && cfl < 1)) throw ConfigError("cfl must lie in (0, 1)");
    state_.omega = std::move(omega0);
    state_.C = std::move(C0);
    state_.velocity = setup_->velocity().reconstruct(state_.omega, state_.C);
}

std::vector<double> Simulation::interior_flux() const {
    const Mesh& m = setup_->mesh();
    const auto& psi = state_.velocity.stream;
    const auto& pot = setup_->potential_flux();
    std::vector<double> F(m.interior_edges.size());
    // Flux of a perp gradient across a -> b (left to right) is psi(a) - psi(b), exactly.
    for (size_t e = 0; e < F.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        F[e] = psi[ie.a] - psi[ie.b] + pot[e];
    }
    return F;
}

EdgeData Simulation::boundary_flux() const {
    const Mesh& m = setup_->mesh();
    EdgeData F(m.boundary_edges.size());
    for (size_t b = 0; b < F.size(); ++b) F[b] = setup_->g()[b] * m.boundary_edges[b].length;
    return F;
}

double Simulation::stable_dt() const {
    const Mesh& m = setup_->mesh();
    const auto& u = state_.velocity.u;
    double dt = std::numeric_limits<double>::infinity();
    for (int t = 0; t < m.num_triangles(); ++t) {
        double s = norm(u[t]);
        if (s > 0) dt = std::min(dt, cfl_ * m.incircle_diameter(t) / s);
    }
    std::vector<double> out(m.num_triangles(), 0.0);
    auto Fi = interior_flux();
    for (size_t e = 0; e < Fi.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        if (Fi[e] > 0)
            out[ie.left] += Fi[e];
        else
            out[ie.right] -= Fi[e];
    }
    auto Fb = boundary_flux();
    for (size_t b = 0; b < Fb.size(); ++b)
        if (Fb[b] > 0) out[m.boundary_edges[b].tri] += Fb[b];
    for (int t = 0; t < m.num_triangles(); ++t)
        if (out[t] > 0) dt = std::min(dt, cfl_ * m.areas[t] / out[t]);
    return dt;
}

StepInfo Simulation::advance(double dt) {
    const Mesh& m = setup_->mesh();
    const auto& omega = state_.omega;
    StepInfo info;
    info.t0 = state_.t;
    info.dt = dt;
    info.trace.assign(m.boundary_edges.size(), 0.0);

    std::vector<double> delta(m.num_triangles(), 0.0);
    auto Fi = interior_flux();
    for (size_t e = 0; e < Fi.size(); ++e) {
        const auto& ie = m.interior_edges[e];
        double flux = Fi[e] * (Fi[e] > 0 ? omega[ie.left] : omega[ie.right]);
        delta[ie.left] -= flux;
        delta[ie.right] += flux;
    }
    auto Fb = boundary_flux();
    std::vector<double> kelvin(m.num_components(), 0.0);
    double bsum = 0;
    for (size_t b = 0; b < Fb.size(); ++b) {
        const auto& be = m.boundary_edges[b];
        bool entering = Fb[b] < 0 && m.components[be.comp].role == Role::Inflow;
        double tr = entering ? omega_in_(be.comp, state_.t) : omega[be.tri];
        info.trace[b] = tr;
        delta[be.tri] -= Fb[b] * tr;
        kelvin[be.comp] += Fb[b] * tr;
        bsum += Fb[b] * tr;
    }
    info.boundary_transport = dt * bsum;

    P0Scalar next(omega.size());
    double mass = 0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        next[t] = omega[t] + dt * delta[t] / m.areas[t];
        mass += m.areas[t] * (next[t] - omega[t]);
    }
    info.mass_change = mass;
    for (int c = 0; c < m.num_components(); ++c) state_.C[c] -= dt * kelvin[c];

    P1Field guess = std::move(state_.velocity.green);
    state_.velocity = setup_->velocity().reconstruct(next, state_.C, &guess);
    state_.omega = std::move(next);
    state_.t += dt;
    state_.trace = info.trace;
    state_.last_dt = dt;
    return info;
}

Simulation make_simulation(std::shared_ptr<const FlowSetup> setup, const Scenario& sc) {
    const Mesh& m = setup->mesh();
    P0Scalar w = scenario_initial_vorticity(m, sc);
    std::vector<double> C = scenario_initial_circulations(m, sc);
    InflowFunction inflow = [sc](int comp, double t) { return scenario_inflow_vorticity(sc, comp, t); };
    return Simulation(std::move(setup), std::move(w), std::move(C), std::move(inflow), sc.cfl);
}

std::vector<Trajectory> run_lockstep(std::vector<Simulation*> sims, double T, int snapshots, const RunOptions& opts) {
    if (sims.empty()) return {};
    if (snapshots < 1) throw ConfigError("snapshots must be at least 1");
    if (T < 0) throw ConfigError("final time must be non-negative");
    std::vector<Trajectory> out(sims.size());
    for (size_t i = 0; i < sims.size(); ++i) {
        out[i].snapshots.push_back(sims[i]->state());
        if (opts.record_steps) out[i].steps.push_back(sims[i]->state());
    }
    if (T == 0) return out;
    const double tiny = 1e-12 * T;
    double t = 0;
    for (int k = 1; k <= snapshots; ++k) {
        const double target = k == snapshots ? T : T * k / snapshots;
        while (target - t > tiny) {
            double dt = target - t;
            for (auto* s : sims) dt = std::min(dt, s->stable_dt());
            if (!(dt > tiny)) {
                std::ostringstream msg;
                double umax = 0;
                for (auto* s : sims)
                    for (const auto& u : s->state().velocity.u) umax = std::max(umax, norm(u));
                msg << "time step underflow at t = " << t << ": dt = " << dt << ", max |u| = " << umax;
                throw SolverError(msg.str());
            }
            for (size_t i = 0; i < sims.size(); ++i) {
                SimState before;
                if (opts.on_step) before = sims[i]->state();
                StepInfo info = sims[i]->advance(dt);
                if (opts.on_step) opts.on_step(static_cast<int>(i), before, info, sims[i]->state());
                if (opts.record_steps) out[i].steps.push_back(sims[i]->state());
                out[i].step_count++;
            }
            t = sims[0]->state().t;
        }
        for (size_t i = 0; i < sims.size(); ++i) out[i].snapshots.push_back(sims[i]->state());
    }
    return out;
}

Trajectory run(const Scenario& sc, const RunOptions& opts) {
    auto setup = make_flow_setup(sc);
    Simulation sim = make_simulation(setup, sc);
    return std::move(run_lockstep({&sim}, sc.T, sc.snapshots, opts)[0]);
}

double kinetic_energy(const Mesh& m, const P0Vector& u) {
    double e = 0;
    for (int t = 0; t < m.num_triangles(); ++t) e += m.areas[t] * norm2(u[t]);
    return 0.5 * e;
}

double weak_residual(const Trajectory& traj, const FlowSetup& setup, const P1Field& phi, double t0, double t1) {
    if (traj.steps.size() < 2) throw PreconditionError("weak residual needs recorded step states");
    const Mesh& m = setup.mesh();
    const LaplaceOperator& op = setup.op();
    auto grad_phi = gradient(op, phi);
    auto volume = [&](const SimState& s) {
        double v = 0;
        for (int t = 0; t < m.num_triangles(); ++t) v += m.areas[t] * s.omega[t] * dot(s.velocity.u[t], grad_phi[t]);
        return v;
    };
    auto moment = [&](const SimState& s) {
        double v = 0;
        for (int t = 0; t < m.num_triangles(); ++t) {
            const auto& tri = m.triangles[t];
            v += m.areas[t] * s.omega[t] * (phi[tri[0]] + phi[tri[1]] + phi[tri[2]]) / 3.0;
        }
        return v;
    };
    const double eps = 1e-12 * std::max(1.0, std::abs(t1));
    double vol = 0, bnd = 0;
    const SimState* first = nullptr;
    const SimState* last = nullptr;
    for (size_t i = 0; i + 1 < traj.steps.size(); ++i) {
        const SimState& a = traj.steps[i];
        const SimState& b = traj.steps[i + 1];
        if (a.t < t0 - eps || b.t > t1 + eps) continue;
        if (!first) first = &a;
        last = &b;
        double dt = b.t - a.t;
        vol += 0.5 * dt * (volume(a) + volume(b));
        double s = 0;
        for (size_t e = 0; e < m.boundary_edges.size(); ++e) {
            const auto& be = m.boundary_edges[e];
            s += b.trace[e] * 0.5 * (phi[be.a] + phi[be.b]) * setup.g()[e] * be.length;
        }
        bnd += dt * s;
    }
    if (!first) return 0.0;
    return vol - (moment(*last) - moment(*first)) - bnd;
}

void write_trajectory_csv(std::ostream& out, const Mesh& m, const Trajectory& traj) {
    out << "t";
    for (int c = 0; c < m.num_components(); ++c) out << ",C_" << c;
    out << ",vort_mass,vort_min,vort_max,energy,dt\n";
    out << std::setprecision(17);
    for (const auto& s : traj.snapshots) {
        out << s.t;
        for (double c : s.C) out << "," << c;
        double mn = s.omega.empty() ? 0 : *std::min_element(s.omega.begin(), s.omega.end());
        double mx = s.omega.empty() ? 0 : *std::max_element(s.omega.begin(), s.omega.end());
        out << "," << integrate_p0(m, s.omega) << "," << mn << "," << mx << ","
            << kinetic_energy(m, s.velocity.u) << "," << s.last_dt << "\n";
    }
}

}  // namespace eulerss
