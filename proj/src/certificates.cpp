#include "eulerss/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

namespace eulerss {

namespace {

double pow_term(double sq, double p) { return sq > 0 ? std::pow(sq, (p - 1) / p) : 0.0; }

}  // namespace

// ---------------------------------------------------------------- difference stream

DifferenceStream difference_stream(const FlowSetup& setup, const SimState& a, const SimState& b) {
    const Mesh& m = setup.mesh();
    if (a.omega.size() != b.omega.size() || static_cast<int>(a.omega.size()) != m.num_triangles() ||
        a.C.size() != b.C.size())
        throw ConfigError("difference stream: states do not belong to the same mesh");
    P0Scalar w(a.omega.size());
    for (size_t t = 0; t < w.size(); ++t) w[t] = a.omega[t] - b.omega[t];
    DifferenceStream d;
    d.circulation.resize(a.C.size());
    for (size_t c = 0; c < a.C.size(); ++c) d.circulation[c] = a.C[c] - b.C[c];
    VelocityAssembly va = setup.velocity().reconstruct(w, d.circulation);
    d.psi = std::move(va.stream);
    d.psi_const = std::move(va.psi);
    d.u = perp_gradient(setup.op(), d.psi);
    return d;
}

double weak_normal_trace_residual(const LaplaceOperator& op, const P0Vector& u, const EdgeData& g) {
    const Mesh& m = op.mesh();
    std::vector<double> r(m.num_vertices(), 0.0);
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& gr = op.hat_gradients(t);
        for (int k = 0; k < 3; ++k) r[m.triangles[t][k]] += m.areas[t] * dot(u[t], gr[k]);
    }
    auto bl = boundary_load(op, g);
    double worst = 0;
    for (int a = 0; a < m.num_vertices(); ++a)
        if (m.node_component[a] >= 0) worst = std::max(worst, std::abs(r[a] - bl[a]));
    return worst;
}

double interpolation_defect(const Mesh& m, const P0Vector& w, const std::vector<double>& p_grid) {
    const double l2 = lp_norm(m, w, 2);
    const double linf = lp_norm(m, w, std::numeric_limits<double>::infinity());
    double worst = -std::numeric_limits<double>::infinity();
    for (double p : p_grid) {
        double lhs = lp_norm(m, w, 2 * p / (p - 1));
        double rhs = std::pow(linf, 1 / p) * std::pow(l2, (p - 1) / p);
        worst = std::max(worst, rhs > 0 ? (lhs - rhs) / rhs : lhs);
    }
    return worst;
}

// ---------------------------------------------------------------- Lamb identity

namespace {

void finish_lamb(LambTerms& r) {
    r.lhs = r.bnd_uv_wn - r.bnd_uw_vn - r.bnd_vw_un;
    r.rhs = r.vol_uv_divw - r.vol_curlu - r.vol_curlv - r.vol_u_vgradw - r.vol_v_ugradw;
    r.residual = std::abs(r.lhs - r.rhs);
}

// Degree-4 rule on the reference triangle (barycentric points, weights summing to 1).
struct TriPoint {
    double l0, l1, l2, w;
};
const TriPoint kTriRule[6] = {
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
};

double weak_divergence_defect(const LaplaceOperator& op, const P0Vector& u) {
    const Mesh& m = op.mesh();
    std::vector<double> r(m.num_vertices(), 0.0);
    double scale = 0;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& gr = op.hat_gradients(t);
        for (int k = 0; k < 3; ++k) r[m.triangles[t][k]] += m.areas[t] * dot(u[t], gr[k]);
        scale = std::max(scale, norm(u[t]));
    }
    double worst = 0;
    for (int a = 0; a < m.num_vertices(); ++a)
        if (m.node_component[a] < 0) worst = std::max(worst, std::abs(r[a]));
    return scale > 0 ? worst / scale : 0.0;
}

}  // namespace

LambTerms lamb_check(const Mesh& m, const AnalyticField& u, const AnalyticField& v, const AnalyticField& w) {
    LambTerms r;
    for (int t = 0; t < m.num_triangles(); ++t) {
        const auto& tri = m.triangles[t];
        const Vec2 &p0 = m.vertices[tri[0]], &p1 = m.vertices[tri[1]], &p2 = m.vertices[tri[2]];
        for (const auto& q : kTriRule) {
            Vec2 x = q.l0 * p0 + q.l1 * p1 + q.l2 * p2;
            double wt = q.w * m.areas[t];
            Vec2 uu = u.value(x), vv = v.value(x), ww = w.value(x);
            Mat2 gw = w.grad(x);
            r.vol_uv_divw += wt * dot(uu, vv) * (gw.a00 + gw.a11);
            r.vol_curlu += wt * u.curl(x) * dot(perp(vv), ww);
            r.vol_curlv += wt * v.curl(x) * dot(perp(uu), ww);
            r.vol_u_vgradw += wt * dot(uu, gw * vv);
            r.vol_v_ugradw += wt * dot(vv, gw * uu);
        }
    }
    const double gs = std::sqrt(0.6) / 2;
    const double gx[3] = {0.5 - gs, 0.5, 0.5 + gs};
    const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    for (const auto& be : m.boundary_edges) {
        const Vec2 &pa = m.vertices[be.a], &pb = m.vertices[be.b];
        for (int k = 0; k < 3; ++k) {
            Vec2 x = pa + gx[k] * (pb - pa);
            double wt = gw[k] * be.length;
            Vec2 uu = u.value(x), vv = v.value(x), ww = w.value(x);
            r.bnd_uv_wn += wt * dot(uu, vv) * dot(ww, be.normal);
            r.bnd_uw_vn += wt * dot(uu, ww) * dot(vv, be.normal);
            r.bnd_vw_un += wt * dot(vv, ww) * dot(uu, be.normal);
        }
    }
    finish_lamb(r);
    return r;
}

LambTerms lamb_check(const LaplaceOperator& op, const P0Vector& u, const P0Scalar& curl_u, const P0Vector& v,
                     const P0Scalar& curl_v, const P0Vector& w) {
    const Mesh& m = op.mesh();
    LambTerms r;
    auto gw = recovered_gradient(op, w);
    for (int t = 0; t < m.num_triangles(); ++t) {
        double a = m.areas[t];
        r.vol_uv_divw += a * dot(u[t], v[t]) * (gw[t].a00 + gw[t].a11);
        r.vol_curlu += a * curl_u[t] * dot(perp(v[t]), w[t]);
        r.vol_curlv += a * curl_v[t] * dot(perp(u[t]), w[t]);
        r.vol_u_vgradw += a * dot(u[t], gw[t] * v[t]);
        r.vol_v_ugradw += a * dot(v[t], gw[t] * u[t]);
    }
    for (const auto& be : m.boundary_edges) {
        const Vec2 &uu = u[be.tri], &vv = v[be.tri], &ww = w[be.tri];
        r.bnd_uv_wn += be.length * dot(uu, vv) * dot(ww, be.normal);
        r.bnd_uw_vn += be.length * dot(uu, ww) * dot(vv, be.normal);
        r.bnd_vw_un += be.length * dot(vv, ww) * dot(uu, be.normal);
    }
    r.divergence_defect = std::max(weak_divergence_defect(op, u), weak_divergence_defect(op, v));
    finish_lamb(r);
    return r;
}

// ---------------------------------------------------------------- trace inequality

TraceReport trace_inequality_check(const LaplaceOperator& op, const P1Field& h, int comp) {
    const Mesh& m = op.mesh();
    if (comp < 0 || comp >= m.num_components()) throw ConfigError("trace inequality: no such component");
    auto r = nodal_residual(op, h, {});
    double hmax = 0;
    for (double x : h) hmax = std::max(hmax, std::abs(x));
    double interior = 0;
    for (int a = 0; a < m.num_vertices(); ++a)
        if (m.node_component[a] < 0) interior = std::max(interior, std::abs(r[a]));
    if (interior > 10 * default_rtol() * std::max(1.0, hmax) * std::sqrt(static_cast<double>(m.num_vertices())))
        throw PreconditionError("trace inequality: input is not discretely harmonic");

    // Nodal flux over the lumped boundary length gives a pointwise normal derivative.
    std::vector<double> lumped(m.num_vertices(), 0.0);
    TraceReport rep;
    for (int e : m.components[comp].edges) {
        const auto& be = m.boundary_edges[e];
        lumped[be.a] += 0.5 * be.length;
        lumped[be.b] += 0.5 * be.length;
        double d = h[be.b] - h[be.a];
        rep.tangential += d * d / be.length;
    }
    for (int a : m.components[comp].nodes) rep.lhs += r[a] * r[a] / lumped[a];
    auto Ah = op.matrix() * h;
    for (size_t a = 0; a < h.size(); ++a) rep.energy += h[a] * Ah[a];
    // Constants carry round-off energy only.
    rep.c_required = rep.energy > 1e-12 * std::max(1.0, hmax * hmax) ? std::max(0.0, rep.lhs - rep.tangential) / rep.energy : 0.0;
    return rep;
}

TraceFamilyReport trace_inequality_family(const LaplaceOperator& op, int comp, int samples, int modes,
                                          unsigned seed) {
    const Mesh& m = op.mesh();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> coef(0.0, 1.0);
    TraceFamilyReport rep;
    for (int s = 0; s < samples; ++s) {
        P1Field trace(m.num_vertices(), 0.0);
        for (const auto& bc : m.components) {
            // Fourier modes in normalized arclength along the loop.
            std::vector<double> ca(modes + 1), sa(modes + 1);
            for (int k = 0; k <= modes; ++k) {
                ca[k] = coef(rng);
                sa[k] = coef(rng);
            }
            double arc = 0;
            for (size_t k = 0; k < bc.edges.size(); ++k) {
                double th = 2 * std::numbers::pi * arc / bc.length;
                double val = ca[0];
                for (int j = 1; j <= modes; ++j) val += ca[j] * std::cos(j * th) + sa[j] * std::sin(j * th);
                trace[bc.nodes[k]] = val;
                arc += m.boundary_edges[bc.edges[k]].length;
            }
        }
        P1Field h = solve_dirichlet_trace(op, std::vector<double>(m.num_vertices(), 0.0), trace);
        double c = trace_inequality_check(op, h, comp).c_required;
        rep.max_c = std::max(rep.max_c, c);
        rep.mean_c += c;
        ++rep.samples;
    }
    if (rep.samples > 0) rep.mean_c /= rep.samples;
    return rep;
}

// ---------------------------------------------------------------- twin ledger

namespace {

struct StepSample {
    double t = 0;
    double u2 = 0, v2 = 0;
    double conv = 0, tri = 0, vort = 0;
    double out_energy = 0, in_energy = 0, out_coupling = 0, in_coupling = 0, bnd_abs = 0;
    std::vector<double> psi, D, C;
    std::vector<double> phi_edge;   // mean of phi~ on each boundary edge
    std::vector<double> upow, vpow, zpow;
    AuxiliaryState aux;
};

class TwinAccumulator {
public:
    TwinAccumulator(const FlowSetup& setup, std::vector<double> p_grid) : setup_(setup) {
        report_.p_grid = std::move(p_grid);
    }

    StepSample sample(const SimState& a, const SimState& b, const P1Field* guess) const {
        const Mesh& m = setup_.mesh();
        const LaplaceOperator& op = setup_.op();
        const EdgeData& g = setup_.g();
        const int nt = m.num_triangles();
        StepSample s;
        s.t = a.t;
        P0Vector ud(nt), um(nt), vd;
        P0Scalar wd(nt), wm(nt);
        for (int t = 0; t < nt; ++t) {
            ud[t] = a.velocity.u[t] - b.velocity.u[t];
            um[t] = 0.5 * (a.velocity.u[t] + b.velocity.u[t]);
            wd[t] = a.omega[t] - b.omega[t];
            wm[t] = 0.5 * (a.omega[t] + b.omega[t]);
        }
        P1Field psi(a.velocity.stream.size());
        for (size_t i = 0; i < psi.size(); ++i) psi[i] = a.velocity.stream[i] - b.velocity.stream[i];
        s.psi.resize(a.C.size());
        s.C.resize(a.C.size());
        for (size_t c = 0; c < a.C.size(); ++c) {
            s.psi[c] = a.velocity.psi[c] - b.velocity.psi[c];
            s.C[c] = a.C[c] - b.C[c];
        }
        s.aux = solve_auxiliary(op, psi, wd, guess);
        s.D = s.aux.D;
        const P0Vector& v = s.aux.v;
        auto gu = recovered_gradient(op, um);
        for (int t = 0; t < nt; ++t) {
            double ar = m.areas[t];
            s.u2 += ar * norm2(ud[t]);
            s.v2 += ar * norm2(v[t]);
            s.conv += ar * dot(ud[t], gu[t] * ud[t]);
            s.tri += ar * (dot(ud[t], gu[t] * v[t]) + dot(v[t], gu[t] * ud[t]));
            s.vort += ar * wm[t] * dot(ud[t], perp(v[t]));
        }
        s.phi_edge.resize(m.boundary_edges.size());
        for (size_t e = 0; e < m.boundary_edges.size(); ++e) {
            const auto& be = m.boundary_edges[e];
            s.phi_edge[e] = 0.5 * (s.aux.phi[be.a] + s.aux.phi[be.b]);
            const Vec2& ut = ud[be.tri];
            const Vec2& vt = v[be.tri];
            const double L = be.length, ge = g[e];
            s.bnd_abs += norm2(ut) * std::abs(ge) * L;
            if (ge > 0) {
                s.out_energy += norm2(ut) * ge * L;
                s.out_coupling += dot(ut, vt) * (-ge) * L;
            } else if (ge < 0) {
                s.in_energy += norm2(ut) * (-ge) * L;
                // Mean velocity on the boundary: tangential part of the cell value plus the prescribed normal flux.
                const Vec2& um_t = um[be.tri];
                Vec2 ub = dot(um_t, be.tangent) * be.tangent + ge * be.normal;
                s.in_coupling += dot(ut, ub) * dot(vt, be.normal) * L;
            }
        }
        for (double p : report_.p_grid) {
            s.upow.push_back(pow_term(s.u2, p));
            s.vpow.push_back(pow_term(s.v2, p));
            s.zpow.push_back(pow_term(s.u2 + s.v2, p));
        }
        return s;
    }

    void start(const SimState& a, const SimState& b) {
        prev_ = sample(a, b, nullptr);
        for (int c : setup_.mesh().components_with_role(Role::Inflow)) {
            double d = a.C[c] - b.C[c];
            report_.circulation0_sq += d * d;
        }
        open_row(prev_);
        push_snapshot(a, b, prev_);
    }

    void step(const SimState& a, const StepInfo& ia, const SimState& b, const StepInfo& ib) {
        StepSample cur = sample(a, b, &prev_.aux.phi);
        const Mesh& m = setup_.mesh();
        const EdgeData& g = setup_.g();
        const double dt = cur.t - prev_.t;
        const double h = 0.5 * dt;
        LedgerRow& r = row_;
        r.steps++;
        r.boundary += h * 0.5 * ((prev_.out_energy - prev_.in_energy) + (cur.out_energy - cur.in_energy));
        r.convective += h * (prev_.conv + cur.conv);
        r.inflow += h * (prev_.in_energy + cur.in_energy);
        r.outflow_coupling += h * (prev_.out_coupling + cur.out_coupling);
        r.inflow_coupling += h * (prev_.in_coupling + cur.in_coupling);
        r.trilinear += h * (prev_.tri + cur.tri);
        r.vorticity_coupling += h * (prev_.vort + cur.vort);
        r.outflow_energy += h * (prev_.out_energy + cur.out_energy);
        r.u2_int += h * (prev_.u2 + cur.u2);
        r.v2_int += h * (prev_.v2 + cur.v2);
        r.z_int += h * (prev_.u2 + prev_.v2 + cur.u2 + cur.v2);
        for (size_t k = 0; k < report_.p_grid.size(); ++k) {
            r.u_pow_int[k] += h * (prev_.upow[k] + cur.upow[k]);
            r.v_pow_int[k] += h * (prev_.vpow[k] + cur.vpow[k]);
            r.z_pow_int[k] += h * (prev_.zpow[k] + cur.zpow[k]);
        }
        r.boundary_abs += h * (prev_.bnd_abs + cur.bnd_abs);
        for (size_t c = 1; c < cur.psi.size(); ++c) {
            double dpsi = cur.psi[c] - prev_.psi[c];
            r.circulation_term += dpsi * 0.5 * (prev_.D[c] + cur.D[c]);
            if (dt > 0) r.psi_prime_sq += dpsi * dpsi / dt;
        }
        for (size_t e = 0; e < m.boundary_edges.size(); ++e) {
            if (!(g[e] < 0)) continue;
            double wd = ia.trace[e] - ib.trace[e];
            omega_in_sup2_ = std::max(omega_in_sup2_, wd * wd);
            r.inflow_vorticity += dt * 0.5 * (prev_.phi_edge[e] + cur.phi_edge[e]) * wd * g[e] * m.boundary_edges[e].length;
        }
        report_.step_count++;
        prev_ = std::move(cur);
    }

    void snapshot(const SimState& a, const SimState& b) {
        close_row(prev_);
        push_snapshot(a, b, prev_);
        open_row(prev_);
    }

    TwinReport take() { return std::move(report_); }

private:
    void open_row(const StepSample& s) {
        row_ = LedgerRow{};
        row_.t0 = s.t;
        row_.z0 = s.u2 + s.v2;
        row_.u_pow_int.assign(report_.p_grid.size(), 0.0);
        row_.v_pow_int.assign(report_.p_grid.size(), 0.0);
        row_.z_pow_int.assign(report_.p_grid.size(), 0.0);
        row_start_ = s;
    }

    void close_row(const StepSample& s) {
        LedgerRow& r = row_;
        r.t1 = s.t;
        r.z1 = s.u2 + s.v2;
        r.kinetic_jump = 0.5 * (s.u2 - row_start_.u2);
        r.aux_kinetic_jump = 0.5 * (s.v2 - row_start_.v2);
        r.omega_in_sup2 = omega_in_sup2_;
        r.energy_residual = r.kinetic_jump + r.boundary + r.convective;
        r.aux_residual = r.aux_kinetic_jump + r.inflow -
                         (r.outflow_coupling + r.inflow_coupling - r.trilinear + r.vorticity_coupling -
                          r.circulation_term + r.inflow_vorticity);
        report_.rows.push_back(r);
    }

    void push_snapshot(const SimState& a, const SimState& b, const StepSample& s) {
        const Mesh& m = setup_.mesh();
        const LaplaceOperator& op = setup_.op();
        TwinSample ts;
        ts.t = s.t;
        ts.u2 = s.u2;
        ts.v2 = s.v2;
        ts.z = s.u2 + s.v2;
        ts.convective = s.conv;
        ts.psi_const = s.psi;
        ts.D = s.D;
        ts.circulation = s.C;
        for (const auto& rr : verify_rgf(m, s.aux, s.C)) ts.rgf_max = std::max(ts.rgf_max, rr.residual);
        ts.aux_residual = auxiliary_residual(op, s.aux);
        P0Vector ud(m.num_triangles());
        for (int t = 0; t < m.num_triangles(); ++t) {
            ud[t] = a.velocity.u[t] - b.velocity.u[t];
            ts.u_inf = std::max(ts.u_inf, norm(ud[t]));
        }
        ts.normal_trace = weak_normal_trace_residual(op, ud, EdgeData(m.boundary_edges.size(), 0.0));
        ts.interpolation = std::max(interpolation_defect(m, ud, report_.p_grid),
                                    interpolation_defect(m, s.aux.v, report_.p_grid));
        report_.samples.push_back(std::move(ts));
    }

    const FlowSetup& setup_;
    TwinReport report_;
    StepSample prev_, row_start_;
    LedgerRow row_;
    double omega_in_sup2_ = 0;
};

}  // namespace

TwinReport certify_twins(Simulation& a, Simulation& b, double T, int snapshots, const std::vector<double>& p_grid) {
    if (&a.setup() != &b.setup())
        throw ConfigError("twin runs must share one flow setup (same mesh and boundary flux)");
    if (snapshots < 1) throw ConfigError("snapshots must be at least 1");
    TwinAccumulator acc(a.setup(), p_grid);
    acc.start(a.state(), b.state());
    StepInfo info_a;
    const SimState* after_a = nullptr;
    int next = 1;
    RunOptions opts;
    opts.on_step = [&](int run, const SimState&, const StepInfo& info, const SimState& after) {
        if (run == 0) {
            info_a = info;
            after_a = &after;
            return;
        }
        acc.step(*after_a, info_a, after, info);
        const double target = next == snapshots ? T : T * next / snapshots;
        if (std::abs(after.t - target) <= 1e-12 * std::max(1.0, T)) {
            acc.snapshot(*after_a, after);
            ++next;
        }
    };
    run_lockstep({&a, &b}, T, snapshots, opts);
    return acc.take();
}

// ---------------------------------------------------------------- inequality ledger

InequalityReport inequality_ledger(const TwinReport& twin) {
    InequalityReport rep;
    rep.p_grid = twin.p_grid;
    const double tiny = std::numeric_limits<double>::min();
    auto update = [&](double& c, double excess, double denom) {
        if (denom > tiny) c = std::max(c, excess / denom);
    };
    struct Pieces {
        double excess, denom;
    };
    // Each inequality as (left side minus terms carrying no constant) over the terms multiplied by the constant.
    auto energy = [&](const LedgerRow& r, size_t k) {
        double p = twin.p_grid[k];
        return Pieces{r.kinetic_jump + 0.5 * r.outflow_energy - 0.5 * r.inflow, p * r.u_pow_int[k]};
    };
    auto aux = [&](const LedgerRow& r, size_t k) {
        double p = twin.p_grid[k];
        double dt = r.t1 - r.t0;
        return Pieces{r.aux_kinetic_jump + 0.875 * r.inflow + 0.25 * r.outflow_energy - dt * twin.circulation0_sq,
                      r.u2_int + r.v2_int + p * (r.u_pow_int[k] + r.v_pow_int[k]) + dt * r.omega_in_sup2};
    };
    auto tag = [&](const LedgerRow& r, size_t k) {
        double p = twin.p_grid[k];
        double dt = r.t1 - r.t0;
        return Pieces{(r.z1 - r.z0) + 0.5 * r.boundary_abs,
                      r.u2_int + r.v2_int + p * (r.u_pow_int[k] + r.v_pow_int[k]) +
                          dt * (r.omega_in_sup2 + twin.circulation0_sq)};
    };
    auto growth = [&](const LedgerRow& r, size_t k) {
        double p = twin.p_grid[k];
        double dt = r.t1 - r.t0;
        return Pieces{r.z1 - r.z0, r.z_int + p * r.z_pow_int[k] + dt * (r.omega_in_sup2 + twin.circulation0_sq)};
    };
    for (const auto& r : twin.rows)
        for (size_t k = 0; k < twin.p_grid.size(); ++k) {
            auto e = energy(r, k);
            update(rep.c_energy, e.excess, e.denom);
            auto a = aux(r, k);
            update(rep.c_aux, a.excess, a.denom);
            auto t = tag(r, k);
            update(rep.c_tag, t.excess, t.denom);
            auto z = growth(r, k);
            update(rep.c_z, z.excess, z.denom);
        }
    auto flagged = [](Pieces x, double c) {
        return x.excess > 1.01 * c * x.denom + 1e-14 * std::max(1.0, std::abs(x.excess));
    };
    for (const auto& r : twin.rows)
        for (size_t k = 0; k < twin.p_grid.size(); ++k) {
            rep.flags += flagged(energy(r, k), rep.c_energy);
            rep.flags += flagged(aux(r, k), rep.c_aux);
            rep.flags += flagged(tag(r, k), rep.c_tag);
            rep.flags += flagged(growth(r, k), rep.c_z);
        }
    for (const auto& s : twin.samples)
        for (double p : twin.p_grid) {
            double d = p * pow_term(s.u2, p);
            if (d > tiny) rep.c_convective = std::max(rep.c_convective, std::abs(s.convective) / d);
        }
    for (const auto& r : twin.rows) {
        rep.psi_prime_lhs += r.psi_prime_sq;
        rep.psi_prime_rhs += r.u2_int + r.boundary_abs;
    }
    return rep;
}

void write_ledger_csv(std::ostream& out, const TwinReport& twin) {
    out << "t0,t1,steps,kinetic_jump,boundary,convective,energy_residual,aux_kinetic_jump,inflow,outflow_coupling,"
           "inflow_coupling,trilinear,vorticity_coupling,circulation_term,inflow_vorticity,aux_residual,"
           "outflow_energy,u2_int,v2_int,boundary_abs,psi_prime_sq,omega_in_sup2,z0,z1\n";
    out << std::setprecision(17);
    for (const auto& r : twin.rows) {
        out << r.t0 << ',' << r.t1 << ',' << r.steps << ',' << r.kinetic_jump << ',' << r.boundary << ','
            << r.convective << ',' << r.energy_residual << ',' << r.aux_kinetic_jump << ',' << r.inflow << ','
            << r.outflow_coupling << ',' << r.inflow_coupling << ',' << r.trilinear << ',' << r.vorticity_coupling
            << ',' << r.circulation_term << ',' << r.inflow_vorticity << ',' << r.aux_residual << ','
            << r.outflow_energy << ',' << r.u2_int << ',' << r.v2_int << ',' << r.boundary_abs << ','
            << r.psi_prime_sq << ',' << r.omega_in_sup2 << ',' << r.z0 << ',' << r.z1 << '\n';
    }
}

}  // namespace eulerss
