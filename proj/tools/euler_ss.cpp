#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "eulerss/osgood.hpp"

using namespace eulerss;
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& p) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw ConfigError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write " + p.string());
    return out;
}

fs::path output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

std::vector<double> parse_ladder(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("invalid ladder entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty ladder");
    return out;
}

void print_mesh_info(const Mesh& m) {
    std::cout << "vertices: " << m.num_vertices() << ", triangles: " << m.num_triangles()
              << ", edges: " << m.num_edges() << "\n";
    std::cout << "components: " << m.num_components() << ", chi: " << m.euler_characteristic() << "\n";
    for (const auto& c : m.components)
        std::cout << "component " << c.id << ": " << role_name(c.role) << ", edges " << c.edges.size()
                  << ", length " << std::setprecision(10) << c.length << "\n";
    std::cout << "min angle: " << std::setprecision(6) << m.min_angle_deg() << " deg, max edge: "
              << m.max_edge_length() << "\n";
}

std::string sci(double x) {
    std::ostringstream o;
    o << std::scientific << std::setprecision(3) << x;
    return o.str();
}

double rate(double coarse, double fine) { return std::log2(coarse / fine); }

struct CertifyOutcome {
    bool ok = true;
    void line(const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        ok = ok && pass;
    }
};

struct TwinTotals {
    double energy = 0, aux = 0, lamb = 0;
};

TwinTotals twin_totals(const Scenario& a, const Scenario& b) {
    auto setup = make_flow_setup(a);
    Simulation sa = make_simulation(setup, a), sb = make_simulation(setup, b);
    auto rep = certify_twins(sa, sb, a.T, a.snapshots);
    TwinTotals t;
    for (const auto& r : rep.rows) {
        t.energy += r.energy_residual;
        t.aux += r.aux_residual;
    }
    t.energy = std::abs(t.energy);
    t.aux = std::abs(t.aux);
    // Analytic circulation/source triple evaluated on the same mesh.
    const double c = 1 / (2 * std::numbers::pi);
    AnalyticField circ{[c](Vec2 x) { return perp(x) * (c / norm2(x)); }, [](Vec2) { return 0.0; },
                       [c](Vec2 x) {
                           double r2 = norm2(x), r4 = r2 * r2;
                           return Mat2{c * 2 * x.x * x.y / r4, c * (-1 / r2 + 2 * x.y * x.y / r4),
                                       c * (1 / r2 - 2 * x.x * x.x / r4), -c * 2 * x.x * x.y / r4};
                       }};
    AnalyticField src{[c](Vec2 x) { return x * (c / norm2(x)); }, [](Vec2) { return 0.0; },
                      [c](Vec2 x) {
                          double r2 = norm2(x), r4 = r2 * r2;
                          return Mat2{c * (1 / r2 - 2 * x.x * x.x / r4), -c * 2 * x.x * x.y / r4,
                                      -c * 2 * x.x * x.y / r4, c * (1 / r2 - 2 * x.y * x.y / r4)};
                      }};
    t.lamb = lamb_check(setup->mesh(), circ, circ, src).residual;
    return t;
}

int cmd_certify(const std::string& scenario_path, const std::string& pair_path, const std::string& perturb,
                double delta, int refine, const std::string& ledger_path) {
    Scenario a = load_scenario(scenario_path);
    Scenario b = a;
    auto setup = make_flow_setup(a);
    if (!pair_path.empty()) {
        b = load_scenario(pair_path);
    } else if (!perturb.empty()) {
        b = perturb_scenario(a, setup->mesh(), parse_perturbation(perturb), delta);
    }
    Simulation sa = make_simulation(setup, b), sb = make_simulation(setup, a);
    if (scenario_boundary_flux(setup->mesh(), b) != setup->g())
        throw ConfigError("twin scenarios must prescribe the same boundary flux");
    TwinReport rep = certify_twins(sa, sb, a.T, a.snapshots);
    InequalityReport iq = inequality_ledger(rep);
    if (!ledger_path.empty()) {
        auto out = open_output(ledger_path);
        write_ledger_csv(out, rep);
    }
    const double rtol = default_rtol();
    const double scale = setup->mesh().scale();
    double eres = 0, ares = 0, emag = 0, amag = 0, rgf = 0, normal = 0, interp = -1, cmax = 0;
    for (const auto& r : rep.rows) {
        eres += r.energy_residual;
        ares += r.aux_residual;
        emag += std::abs(r.kinetic_jump) + std::abs(r.boundary) + std::abs(r.convective);
        amag += std::abs(r.aux_kinetic_jump) + std::abs(r.inflow) + std::abs(r.trilinear) + std::abs(r.outflow_coupling);
    }
    for (const auto& s : rep.samples) {
        rgf = std::max(rgf, s.rgf_max);
        normal = std::max(normal, s.normal_trace);
        interp = std::max(interp, s.interpolation);
        for (double c : s.circulation) cmax = std::max(cmax, std::abs(c));
    }
    std::cout << std::setprecision(6);
    std::cout << "steps: " << rep.step_count << ", intervals: " << rep.rows.size() << "\n";
    std::cout << "energy identity residual: " << std::abs(eres) << " (term scale " << emag << ")\n";
    std::cout << "auxiliary identity residual: " << std::abs(ares) << " (term scale " << amag << ")\n";
    std::cout << "constants: energy " << iq.c_energy << ", auxiliary " << iq.c_aux << ", combined " << iq.c_tag
              << ", growth " << iq.c_z << ", convective " << iq.c_convective << "\n";
    std::cout << "psi' diagnostic: lhs " << iq.psi_prime_lhs << ", rhs " << iq.psi_prime_rhs << "\n";
    CertifyOutcome out;
    out.line("flux relation", rgf <= 1e-6 * std::max(1.0, cmax), "max |D + C| = " + sci(rgf));
    out.line("normal trace of difference", normal <= 10 * rtol * scale, "max residual = " + sci(normal));
    out.line("interpolation inequality", interp <= 1e-12, "max defect = " + sci(interp));
    out.line("inequality flags", iq.flags == 0, std::to_string(iq.flags) + " flagged");
    if (emag == 0 && amag == 0) {
        out.line("identical twins", std::abs(eres) <= 1e-10 && std::abs(ares) <= 1e-10, "residuals vanish");
    }
    if (refine > 0) {
        std::vector<TwinTotals> levels;
        for (int k = 0; k <= refine; ++k) {
            Scenario ak = a, bk = b;
            ak.mesh.refine += k;
            bk.mesh.refine += k;
            levels.push_back(twin_totals(bk, ak));
        }
        for (int k = 0; k < refine; ++k) {
            const auto &c = levels[k], &f = levels[k + 1];
            std::ostringstream lvl;
            lvl << " (level " << k << " -> " << k + 1 << ")";
            if (c.energy > 0) out.line("energy identity rate" + lvl.str(), rate(c.energy, f.energy) >= 0.8,
                                       sci(rate(c.energy, f.energy)));
            if (c.aux > 0) out.line("auxiliary identity rate" + lvl.str(), rate(c.aux, f.aux) >= 0.8,
                                    sci(rate(c.aux, f.aux)));
            out.line("Lamb identity rate, analytic triple" + lvl.str(), rate(c.lamb, f.lamb) >= 0.9, sci(rate(c.lamb, f.lamb)));
        }
    }
    return out.ok ? 0 : 1;
}

int cmd_stability(const std::string& scenario_path, const std::string& perturb, const std::string& ladder,
                  int threads, const std::string& outdir) {
    Scenario base = load_scenario(scenario_path);
    auto rep = stability_experiment(base, parse_ladder(ladder), parse_perturbation(perturb), threads);
    fs::path dir = output_dir(outdir);
    {
        auto out = open_output(dir / "stability.csv");
        write_stability_csv(out, rep);
    }
    for (size_t i = 0; i < rep.rungs.size(); ++i) {
        if (rep.rungs[i].failed) continue;
        auto out = open_output(dir / ("rung_" + std::to_string(i) + ".csv"));
        write_rung_csv(out, rep.rungs[i]);
    }
    std::cout << std::setprecision(6);
    for (const auto& r : rep.rungs) {
        if (r.failed) {
            std::cout << "delta " << r.delta << ": FAILED (" << r.error << ")\n";
            continue;
        }
        std::cout << "delta " << r.delta << ": y_T " << r.y_T << ", bound_T " << r.bound_T << ", C_hat " << r.C_hat
                  << (r.below_bound ? "" : " (bound violated)") << "\n";
    }
    std::cout << "beta_fit " << rep.beta_fit << " (against delta^2), beta_delta " << rep.beta_delta << ", fitted rungs "
              << rep.fitted_rungs << ", monotone " << (rep.monotone ? "yes" : "no") << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& outdir, bool vtk) {
    Scenario sc = load_scenario(scenario_path);
    auto setup = make_flow_setup(sc);
    Simulation sim = make_simulation(setup, sc);
    auto traj = std::move(run_lockstep({&sim}, sc.T, sc.snapshots)[0]);
    fs::path dir = output_dir(outdir);
    {
        auto out = open_output(dir / "trajectory.csv");
        write_trajectory_csv(out, setup->mesh(), traj);
    }
    if (vtk) {
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            const auto& s = traj.snapshots[k];
            write_vtk(setup->mesh(), (dir / ("snapshot_" + std::to_string(k) + ".vtk")).string(),
                      {{"stream", &s.velocity.stream, nullptr, false},
                       {"vorticity", &s.omega, nullptr, true},
                       {"velocity", nullptr, &s.velocity.u, true}});
        }
    }
    std::cout << "steps: " << traj.step_count << ", snapshots: " << traj.snapshots.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vorticity/stream-function Euler solver with inflow/outflow boundaries and stability certificates"};
    app.require_subcommand(1);

    auto* mesh = app.add_subcommand("mesh", "generate, refine or inspect meshes");
    mesh->require_subcommand(1);
    AnnulusSpec ann;
    std::string ann_out, inner_role = "wall", outer_role = "wall";
    auto* m_ann = mesh->add_subcommand("annulus", "structured annulus mesh");
    m_ann->add_option("--r0", ann.r0, "inner radius")->capture_default_str();
    m_ann->add_option("--r1", ann.r1, "outer radius")->capture_default_str();
    m_ann->add_option("--nr", ann.nr, "radial layers")->capture_default_str();
    m_ann->add_option("--ntheta", ann.ntheta, "angular divisions")->capture_default_str();
    m_ann->add_option("--inner-role", inner_role, "wall, inflow or outflow")->capture_default_str();
    m_ann->add_option("--outer-role", outer_role, "wall, inflow or outflow")->capture_default_str();
    m_ann->add_option("-o,--output", ann_out, "output mesh file")->required();
    std::string ref_in, ref_out;
    int ref_times = 1;
    auto* m_ref = mesh->add_subcommand("refine", "uniform red refinement");
    m_ref->add_option("input", ref_in, "input mesh file")->required();
    m_ref->add_option("-o,--output", ref_out, "output mesh file")->required();
    m_ref->add_option("--times", ref_times, "number of refinements")->capture_default_str()->check(CLI::NonNegativeNumber);
    std::string info_in;
    auto* m_info = mesh->add_subcommand("info", "print counts, topology and quality");
    m_info->add_option("input", info_in, "mesh file")->required();

    std::string sim_scenario, sim_out = "out";
    bool sim_vtk = false;
    auto* sim = app.add_subcommand("simulate", "run one scenario");
    sim->add_option("scenario", sim_scenario, "scenario JSON file")->required();
    sim->add_option("-o,--output", sim_out, "output directory")->capture_default_str();
    sim->add_flag("--vtk", sim_vtk, "write VTK snapshots");

    std::string cert_scenario, cert_pair, cert_perturb, cert_ledger;
    double cert_delta = 0.1;
    int cert_refine = 0;
    auto* cert = app.add_subcommand("certify", "twin run with the certificate suite");
    cert->add_option("scenario", cert_scenario, "base scenario JSON file")->required();
    cert->add_option("--pair", cert_pair, "second scenario (same mesh and boundary flux)");
    cert->add_option("--perturb", cert_perturb, "perturb the base: omega0, omega_in, C0 or all");
    cert->add_option("--delta", cert_delta, "perturbation size")->capture_default_str();
    cert->add_option("--refine", cert_refine, "convergence mode: number of uniform refinements")
        ->check(CLI::NonNegativeNumber);
    cert->add_option("--ledger", cert_ledger, "ledger CSV output");

    std::string st_scenario, st_perturb = "C0", st_ladder = "0,1e-1,1e-2,1e-3", st_out = "out";
    int st_threads = 1;
    auto* st = app.add_subcommand("stability", "perturbation ladder experiment");
    st->add_option("scenario", st_scenario, "base scenario JSON file")->required();
    st->add_option("--perturb", st_perturb, "omega0, omega_in, C0 or all")->capture_default_str();
    st->add_option("--ladder", st_ladder, "comma-separated perturbation sizes")->capture_default_str();
    st->add_option("--threads", st_threads, "parallel rungs")->capture_default_str()->check(CLI::PositiveNumber);
    st->add_option("-o,--output", st_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*m_ann) {
            ann.inner_role = parse_role(inner_role);
            ann.outer_role = parse_role(outer_role);
            Mesh m = generate_annulus(ann.r0, ann.r1, ann.nr, ann.ntheta, ann.inner_role, ann.outer_role);
            save_mesh(m, ann_out);
            std::cout << "wrote " << ann_out << ": " << m.num_vertices() << " vertices, " << m.num_triangles()
                      << " triangles\n";
        } else if (*m_ref) {
            Mesh m = load_mesh(ref_in, {false});
            for (int k = 0; k < ref_times; ++k) m = uniform_refine(m);
            save_mesh(m, ref_out);
            std::cout << "wrote " << ref_out << ": " << m.num_triangles() << " triangles\n";
        } else if (*m_info) {
            print_mesh_info(load_mesh(info_in, {false}));
        } else if (*sim) {
            return cmd_simulate(sim_scenario, sim_out, sim_vtk);
        } else if (*cert) {
            if (!cert_pair.empty() && !cert_perturb.empty()) throw ConfigError("--pair and --perturb are exclusive");
            return cmd_certify(cert_scenario, cert_pair, cert_perturb, cert_delta, cert_refine, cert_ledger);
        } else if (*st) {
            return cmd_stability(st_scenario, st_perturb, st_ladder, st_threads, st_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
