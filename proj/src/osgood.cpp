#include "eulerss/osgood.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/numeric/odeint.hpp>

namespace eulerss {

namespace odeint = boost::numeric::odeint;

double osgood_modulus(double x, double C) {
    if (x <= 0) return 0.0;
    return C * x * (1 + std::abs(std::log(x)));
}

double growth_functional(double p, double x) {
    if (x <= 0) return 0.0;
    return x + p * std::pow(x, 1 - 1 / p);
}

double choose_p(double x) {
    if (x > 0 && x <= std::exp(-2.0)) return std::abs(std::log(x));
    return 2.0;
}

double osgood_bound(const OsgoodParams& prm, double t) {
    if (prm.y0 == 0 && prm.a == 0) return 0.0;
    const double c = prm.y0 + prm.a * t;
    return std::numbers::e * std::pow(c, std::exp(-prm.C * t));
}

namespace {

using State = std::vector<double>;

template <class Rhs>
std::vector<double> integrate_at(Rhs rhs, double y0, const std::vector<double>& times, double tol) {
    std::vector<double> out;
    out.reserve(times.size());
    State y{y0};
    std::vector<double> grid;
    grid.push_back(0.0);
    for (double t : times) grid.push_back(t);
    auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
    bool first = true;
    odeint::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), 1e-3,
                            [&](const State& s, double) {
                                if (first) {
                                    first = false;
                                    return;
                                }
                                out.push_back(s[0]);
                            });
    return out;
}

}  // namespace

std::vector<double> comparison_ode(const OsgoodParams& prm, const std::vector<double>& times, double tol) {
    auto rhs = [&](const State& y, State& dy, double) { dy[0] = prm.a + osgood_modulus(y[0], prm.C); };
    return integrate_at(rhs, prm.y0, times, tol);
}

double oracle_bound(const OsgoodParams& prm, double t, double tol) {
    if (prm.y0 == 0 && prm.a == 0) return 0.0;
    const double c = prm.y0 + prm.a * t;
    auto rhs = [&](const State& y, State& dy, double) { dy[0] = osgood_modulus(y[0], prm.C); };
    double Y = t > 0 ? integrate_at(rhs, c, {t}, tol)[0] : c;
    return std::exp(std::exp(-prm.C * t)) * Y;
}

TechnicalLemmaReport lemma_techn_check(const std::vector<double>& x_grid, double a, double y0, double t,
                                       const std::vector<int>& partitions) {
    TechnicalLemmaReport rep;
    const double e = std::numbers::e;
    const double knee = std::exp(-2.0);
    double xmin = 1;
    for (double x : x_grid) {
        if (!(x > 0 && x <= 1)) throw ConfigError("lemma check: grid points must lie in (0, 1]");
        double F = growth_functional(choose_p(x), x);
        double K = x <= knee ? e : 3.0;
        rep.max_ratio = std::max(rep.max_ratio, F / (K * osgood_modulus(x, 1.0)));
        if (x <= knee) {
            double ref = x + e * x * std::abs(std::log(x));
            rep.identity_defect = std::max(rep.identity_defect, std::abs(F - ref) / ref);
        }
        xmin = std::min(xmin, x);
    }
    double below = std::nextafter(knee, 0.0), above = std::nextafter(knee, 1.0);
    rep.continuity_defect = std::abs(growth_functional(choose_p(below), below) - growth_functional(choose_p(above), above));
    rep.asymptotic_ratio = growth_functional(choose_p(xmin), xmin) / osgood_modulus(xmin, 1.0);

    // Synthetic non-decreasing y with y' = a + min_p F(p, y); the telescoped right-endpoint sum must dominate [y].
    auto phi = [](double y) { return growth_functional(choose_p(y), y); };
    auto rhs = [&](const State& y, State& dy, double) { dy[0] = a + phi(y[0]); };
    for (int n : partitions) {
        std::vector<double> times(n);
        for (int k = 0; k < n; ++k) times[k] = t * (k + 1) / n;
        auto ys = integrate_at(rhs, y0, times, 1e-12);
        double sum = 0;
        for (double yk : ys) sum += phi(yk);
        double jump = ys.back() - y0;
        rep.n.push_back(n);
        rep.riemann_defect.push_back(a * t + t / n * sum - jump);
    }
    return rep;
}

// ---------------------------------------------------------------- stability experiment

Perturbation parse_perturbation(const std::string& spec) {
    Perturbation p;
    std::stringstream ss(spec);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        if (item == "all") {
            p.omega0 = p.omega_in = p.circulation = true;
        } else if (item == "omega0") {
            p.omega0 = true;
        } else if (item == "omega_in") {
            p.omega_in = true;
        } else if (item == "C0") {
            p.circulation = true;
        } else {
            throw ConfigError("unknown perturbation '" + item + "' (expected omega0, omega_in, C0 or all)");
        }
        any = true;
    }
    if (!any) throw ConfigError("empty perturbation specification");
    return p;
}

Scenario perturb_scenario(const Scenario& base, const Mesh& m, const Perturbation& p, double delta) {
    Scenario sc = base;
    if (p.omega0) sc.omega0.shift += delta;
    if (p.omega_in) sc.omega_in_shift += delta;
    if (p.circulation) {
        sc.C0 = scenario_initial_circulations(m, base);
        for (int c = 1; c < m.num_components(); ++c) sc.C0[c] += delta;
    }
    return sc;
}

namespace {

StabilityRung run_rung(std::shared_ptr<const FlowSetup> setup, const Scenario& base, const Perturbation& p,
                       double delta) {
    StabilityRung rung;
    rung.delta = delta;
    try {
        Scenario pert = perturb_scenario(base, setup->mesh(), p, delta);
        Simulation a = make_simulation(setup, pert);
        Simulation b = make_simulation(setup, base);
        TwinReport twin = certify_twins(a, b, base.T, base.snapshots);
        rung.inequalities = inequality_ledger(twin);
        rung.C_hat = rung.inequalities.c_z;
        double data = twin.circulation0_sq + (twin.rows.empty() ? 0.0 : twin.rows.back().omega_in_sup2);
        rung.params = {rung.C_hat, rung.C_hat * data, twin.samples.front().z};
        double y = 0;
        for (const auto& s : twin.samples) {
            y = std::max(y, s.z);
            double b = osgood_bound(rung.params, s.t);
            rung.t.push_back(s.t);
            rung.z.push_back(s.z);
            rung.y.push_back(y);
            rung.u_l2.push_back(std::sqrt(s.u2));
            rung.bound.push_back(b);
            if (y > b) rung.below_bound = false;
        }
        for (const auto& r : twin.rows) rung.boundary_abs += r.boundary_abs;
        rung.y_T = rung.y.back();
        rung.bound_T = rung.bound.back();
    } catch (const Error& e) {
        rung.failed = true;
        rung.error = e.what();
    }
    return rung;
}

}  // namespace

StabilityReport stability_experiment(const Scenario& base, const std::vector<double>& ladder, const Perturbation& p,
                                     int threads) {
    if (ladder.empty()) throw ConfigError("empty perturbation ladder");
    for (double d : ladder)
        if (!(d >= 0)) throw ConfigError("perturbation sizes must be non-negative");
    auto setup = make_flow_setup(base);
    StabilityReport rep;
    rep.T = base.T;
    rep.rungs.resize(ladder.size());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(ladder.size())));
    if (threads == 1) {
        for (size_t i = 0; i < ladder.size(); ++i) rep.rungs[i] = run_rung(setup, base, p, ladder[i]);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (size_t i = w; i < ladder.size(); i += threads) rep.rungs[i] = run_rung(setup, base, p, ladder[i]);
            });
        for (auto& th : pool) th.join();
    }

    // Fit only rungs well above the level reached by an unperturbed twin.
    double floor = 1e-16;
    for (const auto& r : rep.rungs)
        if (!r.failed && r.delta == 0) floor = std::max(floor, r.y_T);
    floor *= 1e3;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rep.rungs)
        if (!r.failed && r.delta > 0 && r.y_T > floor) pts.push_back({std::log(r.delta), std::log(r.y_T)});
    rep.fitted_rungs = static_cast<int>(pts.size());
    if (pts.size() >= 2) {
        double mx = 0, my = 0;
        for (auto [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= pts.size();
        my /= pts.size();
        double sxy = 0, sxx = 0;
        for (auto [x, y] : pts) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        rep.beta_delta = sxx > 0 ? sxy / sxx : 0.0;
        rep.beta_fit = 0.5 * rep.beta_delta;
    }
    std::vector<const StabilityRung*> ok;
    for (const auto& r : rep.rungs)
        if (!r.failed) ok.push_back(&r);
    std::sort(ok.begin(), ok.end(), [](auto* x, auto* y) { return x->delta < y->delta; });
    for (size_t i = 1; i < ok.size(); ++i)
        if (ok[i]->delta > ok[i - 1]->delta && !(ok[i]->y_T > ok[i - 1]->y_T)) rep.monotone = false;
    return rep;
}

void write_stability_csv(std::ostream& out, const StabilityReport& rep) {
    out << "delta,T,y_T,bound_T,beta_fit,C_hat\n" << std::setprecision(17);
    for (const auto& r : rep.rungs) {
        if (r.failed) {
            out << r.delta << ',' << rep.T << ",nan,nan," << rep.beta_fit << ",nan\n";
            continue;
        }
        out << r.delta << ',' << rep.T << ',' << r.y_T << ',' << r.bound_T << ',' << rep.beta_fit << ',' << r.C_hat
            << '\n';
    }
}

void write_rung_csv(std::ostream& out, const StabilityRung& rung) {
    out << "t,z,y,u_l2,bound\n" << std::setprecision(17);
    for (size_t i = 0; i < rung.t.size(); ++i)
        out << rung.t[i] << ',' << rung.z[i] << ',' << rung.y[i] << ',' << rung.u_l2[i] << ',' << rung.bound[i] << '\n';
}

}  // namespace eulerss
