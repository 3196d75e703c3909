#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "eulerss/transport.hpp"
#include "test_support.hpp"

using namespace eulerss;
using namespace testing_support;

namespace {

// Radial through-flow of total flux Q from the inner circle to the outer circle.
Scenario radial_scenario(int nr, double Q, double T, const std::string& omega0_json, double omega_in,
                         double c_inner = 0.0, int snapshots = 5) {
    std::ostringstream j;
    j << R"({"mesh": {"annulus": {"r0": 1, "r1": 2, "nr": )" << nr << R"(, "ntheta": )" << 8 * nr
      << R"(, "inner_role": "inflow", "outer_role": "outflow"}},
        "g": [{"comp": 1, "profile": "flux", "value": )"
      << -Q << R"(}, {"comp": 0, "profile": "flux", "value": )" << Q << R"(}],
        "omega0": )" << omega0_json
      << R"(, "omega_in": )" << omega_in << R"(, "C0": [0, )" << c_inner << R"(], "T": )" << T
      << R"(, "cfl": 0.5, "snapshots": )" << snapshots << "}";
    return parse_scenario(j.str());
}

double max_cell_divergence(const Simulation& sim) {
    const Mesh& m = sim.setup().mesh();
    auto Fi = sim.interior_flux();
    auto Fb = sim.boundary_flux();
    std::vector<double> div(m.num_triangles(), 0.0);
    for (size_t e = 0; e < Fi.size(); ++e) {
        div[m.interior_edges[e].left] += Fi[e];
        div[m.interior_edges[e].right] -= Fi[e];
    }
    for (size_t b = 0; b < Fb.size(); ++b) div[m.boundary_edges[b].tri] += Fb[b];
    double worst = 0;
    for (double d : div) worst = std::max(worst, std::abs(d));
    return worst;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("scenario parsing is strict") {
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"mesh": {"annulus": {}}, "T": 1, "bogus": 2})"),
                         doctest::Contains("unknown key 'bogus'"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"mesh": {"annulus": {"nr": 2.5}}, "T": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"mesh": {"annulus": {}}, "T": 1, "cfl": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
    CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/scenario.json"), doctest::Contains("/nonexistent/scenario.json"),
                         ConfigError);
    Scenario sc = parse_scenario(R"({"mesh": {"annulus": {"nr": 2, "ntheta": 16}}, "T": 0.25,
        "omega0": {"profile": "band", "value": 1, "r_min": 1.2, "r_max": 1.5}, "C0": [0, 0.5]})");
    CHECK(sc.mesh.annulus->nr == 2);
    CHECK(sc.omega0.kind == VorticityProfile::Kind::Band);
    CHECK(sc.C0.size() == 2);
}

TEST_CASE("zero vorticity stays zero and circulations are constant") {
    Scenario sc = radial_scenario(4, 1.0, 0.2, "0", 0.0, 0.7);
    RunOptions opts;
    opts.on_step = [](int, const SimState& a, const StepInfo&, const SimState& b) {
        for (double w : b.omega) CHECK(w == 0.0);
        for (size_t c = 0; c < a.C.size(); ++c) CHECK(std::abs(b.C[c] - a.C[c]) <= 1e-14);
    };
    auto traj = run(sc, opts);
    CHECK(traj.step_count > 0);
}

TEST_CASE("potential and stream edge fluxes are divergence free per cell") {
    Scenario sc = radial_scenario(4, 1.0, 0.1, R"({"profile": "gaussian", "amplitude": 2, "width": 0.4, "center": [1.4, 0.3]})",
                                  0.0, 0.9);
    auto setup = make_flow_setup(sc);
    Simulation sim = make_simulation(setup, sc);
    CHECK(max_cell_divergence(sim) < 1e-13);
    sim.advance(0.5 * sim.stable_dt());
    CHECK(max_cell_divergence(sim) < 1e-13);
}

TEST_CASE("constant state is preserved and Kelvin drift is exact") {
    const double w = 1.0, Q = 1.0, T = 0.5;
    Scenario sc = radial_scenario(4, Q, T, "1", w);
    auto traj = run(sc);
    const auto& last = traj.snapshots.back();
    CHECK(last.t == doctest::Approx(T).epsilon(1e-12));
    for (const auto& s : traj.snapshots)
        for (double v : s.omega) CHECK(std::abs(v - w) <= 1e-12);
    CHECK(last.C[0] == doctest::Approx(-w * Q * T).epsilon(1e-12));
    CHECK(last.C[1] == doctest::Approx(w * Q * T).epsilon(1e-12));
}

TEST_CASE("vorticity budget, maximum principle and inflow Kelvin law") {
    Scenario sc = radial_scenario(4, 1.0, 1.0,
                                  R"({"profile": "band", "value": 1, "background": -0.5, "r_min": 1.2, "r_max": 1.6})",
                                  0.25, 0.4, 10);
    double c_inner = sc.C0[1], kelvin_inner = 0;
    RunOptions opts;
    const Mesh* mesh = nullptr;
    auto setup = make_flow_setup(sc);
    mesh = &setup->mesh();
    Simulation sim = make_simulation(setup, sc);
    int steps = 0;
    opts.on_step = [&](int, const SimState&, const StepInfo& info, const SimState& after) {
        double scale = 0;
        for (double v : after.omega) scale = std::max(scale, std::abs(v));
        CHECK(std::abs(info.mass_change + info.boundary_transport) <= 1e-12 * std::max(1.0, scale * mesh->total_area()));
        for (double v : after.omega) {
            CHECK(v <= 1.0 + 1e-12);
            CHECK(v >= -0.5 - 1e-12);
        }
        double s = 0;
        for (int e : mesh->components[1].edges)
            s += 0.25 * setup->g()[e] * mesh->boundary_edges[e].length;
        kelvin_inner += info.dt * s;
        CHECK(std::abs(after.C[1] - (c_inner - kelvin_inner)) <= 1e-13);
        ++steps;
    };
    run_lockstep({&sim}, sc.T, sc.snapshots, opts);
    CHECK(steps >= 10);
}

TEST_CASE("zero final time gives the initial state only") {
    Scenario sc = radial_scenario(2, 1.0, 0.0, "0.5", 0.5);
    auto traj = run(sc);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].t == 0.0);
    CHECK(traj.step_count == 0);
}

TEST_CASE("trajectory CSV is deterministic") {
    Scenario sc = radial_scenario(2, 1.0, 0.3, R"({"profile": "halfplane", "value": 1, "normal": [1, 0]})", 0.0, 0.2);
    std::ostringstream a, b;
    auto setup = make_flow_setup(sc);
    write_trajectory_csv(a, setup->mesh(), run(sc));
    write_trajectory_csv(b, setup->mesh(), run(sc));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("t,C_0,C_1,vort_mass,vort_min,vort_max,energy,dt\n", 0) == 0);
}

TEST_CASE("weak transport identity") {
    RunOptions rec;
    rec.record_steps = true;
    SUBCASE("constant test function reduces to the mass balance") {
        Scenario sc = radial_scenario(4, 1.0, 0.4, R"({"profile": "band", "value": 1, "r_min": 1.1, "r_max": 1.5})",
                                      0.3, 0.5);
        auto setup = make_flow_setup(sc);
        Simulation sim = make_simulation(setup, sc);
        auto traj = run_lockstep({&sim}, sc.T, sc.snapshots, rec)[0];
        P1Field one(setup->mesh().num_vertices(), 1.0);
        CHECK(std::abs(weak_residual(traj, *setup, one, 0.0, sc.T)) <= 1e-10 * setup->mesh().scale());
    }
    SUBCASE("zero vorticity run") {
        Scenario sc = radial_scenario(4, 1.0, 0.2, "0", 0.0, 0.5);
        auto setup = make_flow_setup(sc);
        Simulation sim = make_simulation(setup, sc);
        auto traj = run_lockstep({&sim}, sc.T, sc.snapshots, rec)[0];
        CHECK(weak_residual(traj, *setup, setup->basis().fields[0], 0.0, sc.T) == 0.0);
    }
    SUBCASE("harmonic test function: first-order convergence") {
        std::vector<double> res;
        for (int nr : {4, 8, 16}) {
            Scenario sc = radial_scenario(nr, 1.0, 0.3,
                                          R"({"profile": "gaussian", "amplitude": 1, "width": 0.3, "center": [1.5, 0]})",
                                          0.0, 0.8);
            auto setup = make_flow_setup(sc);
            Simulation sim = make_simulation(setup, sc);
            auto traj = run_lockstep({&sim}, sc.T, sc.snapshots, rec)[0];
            res.push_back(std::abs(weak_residual(traj, *setup, setup->basis().fields[0], 0.0, sc.T)));
        }
        MESSAGE("weak residuals: " << res[0] << " " << res[1] << " " << res[2]);
        CHECK(observed_rate(res[0], res[1]) >= 0.9);
        CHECK(observed_rate(res[1], res[2]) >= 0.9);
    }
}

TEST_CASE("sign-violating scenario is a precondition failure") {
    Scenario sc = radial_scenario(2, -1.0, 0.1, "0", 0.0);
    CHECK_THROWS_AS(make_flow_setup(sc), PreconditionError);
}

}  // TEST_SUITE
