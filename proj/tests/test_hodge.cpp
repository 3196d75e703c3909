#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eulerss/hodge.hpp"
#include "test_support.hpp"

using namespace eulerss;
using namespace testing_support;

namespace {

const double kPi = std::numbers::pi;
const double kLn2 = std::numbers::ln2;

Vec2 e_theta(Vec2 x) { return perp(x) / norm(x); }

EdgeData zero_g(const Mesh& m) { return EdgeData(m.boundary_edges.size(), 0.0); }

EdgeData radial_source_g(const Mesh& m, double Q) {
    EdgeData g(m.boundary_edges.size());
    for (size_t e = 0; e < g.size(); ++e)
        g[e] = m.boundary_edges[e].comp == 1 ? -Q / (2 * kPi) : Q / (4 * kPi);
    return g;
}

double l2_error(const Mesh& m, const P0Vector& u, const std::function<Vec2(Vec2)>& exact) {
    P0Vector d(u.size());
    for (int t = 0; t < m.num_triangles(); ++t) d[t] = u[t] - exact(m.centroids[t]);
    return lp_norm(m, d, 2);
}

}  // namespace

TEST_SUITE("hodge") {

TEST_CASE("harmonic basis on the annulus") {
    std::vector<double> err;
    for (int nr : {4, 8, 16}) {
        Mesh m = annulus(nr);
        LaplaceOperator op(m);
        HarmonicBasis hb = compute_harmonic_basis(op);
        REQUIRE(hb.size() == 1);
        for (int v : m.components[1].nodes) CHECK(hb.fields[0][v] == 1.0);
        for (int v : m.components[0].nodes) CHECK(hb.fields[0][v] == 0.0);
        err.push_back(max_abs_diff(hb.fields[0], interpolate(m, [](Vec2 x) { return std::log(2 / norm(x)) / kLn2; })));
        if (nr == 16) CHECK(hb.flux[0][0] == doctest::Approx(2 * kPi / kLn2).epsilon(0.01));
        for (const auto& row : hb.flux_extended) {
            double s = 0;
            for (double v : row) s += v;
            CHECK(std::abs(s) < 1e-10);
        }
    }
    CHECK(observed_rate(err[0], err[1]) >= 1.8);
    CHECK(observed_rate(err[1], err[2]) >= 1.8);
}

TEST_CASE("dual basis coefficient and defining flux") {
    Mesh m = annulus(16);
    LaplaceOperator op(m);
    HarmonicBasis hb = compute_harmonic_basis(op);
    DualBasis db = compute_dual_basis(hb);
    CHECK(db.coeff[0][0] == doctest::Approx(-kLn2 / (2 * kPi)).epsilon(0.01));
    CHECK(std::abs(consistent_flux(op, db.fields[0], {}, 1) + 1.0) < 1e-8);
}

TEST_CASE("two-hole domain: symmetric flux matrix and dual basis") {
    Mesh m = two_hole_mesh(4);
    CHECK(m.num_components() == 3);
    CHECK(m.euler_characteristic() == -1);
    LaplaceOperator op(m);
    HarmonicBasis hb = compute_harmonic_basis(op);
    REQUIRE(hb.size() == 2);
    CHECK(std::abs(hb.flux[0][1] - hb.flux[1][0]) <= 1e-10);
    CHECK(hb.flux[0][1] < 0);
    DualBasis db = compute_dual_basis(hb);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            double expect = k == l ? -1.0 : 0.0;
            CHECK(std::abs(consistent_flux(op, db.fields[k], {}, hb.inner[l]) - expect) < 1e-8);
        }
    for (const auto& row : hb.flux_extended) {
        double s = 0;
        for (double v : row) s += v;
        CHECK(std::abs(s) < 1e-10);
    }
}

TEST_CASE("pure circulation flow") {
    const double gamma = 1.7;
    std::vector<double> err;
    for (int nr : {4, 8, 16}) {
        Mesh m = annulus(nr);
        LaplaceOperator op(m);
        HarmonicBasis hb = compute_harmonic_basis(op);
        auto va = reconstruct_velocity(op, hb, P0Scalar(m.num_triangles(), 0.0), zero_g(m), {0.0, gamma});
        CHECK(std::abs(consistent_circulation(op, va, 1) - gamma) <= 1e-8);
        // Tangent runs clockwise on the hole, so positive circulation turns clockwise.
        err.push_back(l2_error(m, va.u, [&](Vec2 x) { return e_theta(x) * (-gamma / (2 * kPi * norm(x))); }));
    }
    CHECK(observed_rate(err[0], err[1]) >= 0.9);
    CHECK(observed_rate(err[1], err[2]) >= 0.9);
}

TEST_CASE("radial source flow") {
    std::vector<double> err;
    for (int nr : {4, 8, 16}) {
        Mesh m = annulus(nr, Role::Inflow, Role::Outflow);
        LaplaceOperator op(m);
        HarmonicBasis hb = compute_harmonic_basis(op);
        auto g = radial_source_g(m, 1.0);
        auto va = reconstruct_velocity(op, hb, P0Scalar(m.num_triangles(), 0.0), g, {0.0, 0.0});
        CHECK(std::abs(consistent_circulation(op, va, 1)) <= 1e-8);
        err.push_back(l2_error(m, va.u, [](Vec2 x) { return x / (2 * kPi * norm2(x)); }));
    }
    CHECK(observed_rate(err[0], err[1]) >= 0.9);
    CHECK(observed_rate(err[1], err[2]) >= 0.9);
}

TEST_CASE("Green part alone is reproduced when the circulation matches its flux") {
    Mesh m = annulus(8);
    LaplaceOperator op(m);
    HarmonicBasis hb = compute_harmonic_basis(op);
    P0Scalar one(m.num_triangles(), 1.0);
    auto load = vorticity_load(op, one);
    auto G = solve_dirichlet(op, load, {0.0, 0.0});
    double c = consistent_flux(op, G, load, 1);
    auto va = reconstruct_velocity(op, hb, one, zero_g(m), {0.0, c});
    CHECK(std::abs(va.psi[1]) < 1e-9);
    auto uG = perp_gradient(op, G);
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(norm(va.u[t] - uG[t]) < 1e-8);
}

TEST_CASE("weak divergence constraint") {
    Mesh m = annulus(8, Role::Inflow, Role::Outflow);
    LaplaceOperator op(m);
    HarmonicBasis hb = compute_harmonic_basis(op);
    auto g = radial_source_g(m, 0.8);
    P0Scalar w = sample_cells(m, [](Vec2 x) { return std::cos(x.x) + x.y; });
    auto va = reconstruct_velocity(op, hb, w, g, {0.0, 0.3});
    auto bl = boundary_load(op, g);
    std::vector<double> div(m.num_vertices(), 0.0);
    for (int t = 0; t < m.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) div[m.triangles[t][k]] += m.areas[t] * dot(va.u[t], op.hat_gradients(t)[k]);
    for (int a = 0; a < m.num_vertices(); ++a) CHECK(std::abs(div[a] - bl[a]) <= 10 * 1e-10 * m.scale());
}

TEST_CASE("sign condition violations name the edge") {
    Mesh m = annulus(4, Role::Inflow, Role::Outflow);
    LaplaceOperator op(m);
    HarmonicBasis hb = compute_harmonic_basis(op);
    auto g = radial_source_g(m, -1.0);
    CHECK_THROWS_WITH_AS(reconstruct_velocity(op, hb, P0Scalar(m.num_triangles(), 0.0), g, {0.0, 0.0}),
                         doctest::Contains("boundary edge"), PreconditionError);
    Mesh w = annulus(4);
    LaplaceOperator opw(w);
    HarmonicBasis hbw = compute_harmonic_basis(opw);
    CHECK_THROWS_AS(reconstruct_velocity(opw, hbw, P0Scalar(w.num_triangles(), 0.0), radial_source_g(w, 1.0),
                                         {0.0, 0.0}),
                    PreconditionError);
}

TEST_CASE("elliptic growth report") {
    Mesh m = annulus(8);
    LaplaceOperator op(m);
    HarmonicBasis hb = compute_harmonic_basis(op);
    P0Scalar zero(m.num_triangles(), 0.0);
    auto va0 = reconstruct_velocity(op, hb, zero, zero_g(m), {0.0, 0.0});
    auto rep0 = check_elliptic_growth(op, va0, zero, zero_g(m), {0.0, 0.0});
    for (double r : rep0.ratio) CHECK(r == 0.0);

    P0Scalar one(m.num_triangles(), 1.0);
    auto va1 = reconstruct_velocity(op, hb, one, zero_g(m), {0.0, 0.0});
    auto rep1 = check_elliptic_growth(op, va1, one, zero_g(m), {0.0, 0.0});
    for (size_t k = 1; k < rep1.ratio.size(); ++k) CHECK(rep1.ratio[k] < rep1.ratio[k - 1]);
    CHECK(rep1.bounded);

    for (int nr : {4, 8, 16}) {
        Mesh mm = annulus(nr);
        LaplaceOperator o(mm);
        HarmonicBasis h = compute_harmonic_basis(o);
        P0Scalar checker(mm.num_triangles());
        for (int t = 0; t < mm.num_triangles(); ++t) checker[t] = (t / 2 + t / (16 * nr)) % 2 ? 1.0 : -1.0;
        auto va = reconstruct_velocity(o, h, checker, zero_g(mm), {0.0, 0.0});
        CHECK(check_elliptic_growth(o, va, checker, zero_g(mm), {0.0, 0.0}).bounded);
    }
}

}  // TEST_SUITE
