#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "eulerss/certificates.hpp"

namespace eulerss {

// Modulus C x (1 + |ln x|), extended by 0 at x = 0.
double osgood_modulus(double x, double C);
// Growth functional x + p x^(1 - 1/p).
double growth_functional(double p, double x);
// Minimizer of growth_functional(., x) over p >= 2: |ln x| below e^-2, 2 otherwise.
double choose_p(double x);

struct OsgoodParams {
    double C = 0;    // growth constant
    double a = 0;    // data term
    double y0 = 0;   // initial value
};

// e (y0 + a t)^(exp(-C t)); exactly 0 when y0 = a = 0.
double osgood_bound(const OsgoodParams& params, double t);

// Adaptive Dormand-Prince integration of y' = a + modulus(y), y(0) = y0, sampled at the given times.
std::vector<double> comparison_ode(const OsgoodParams& params, const std::vector<double>& times, double tol = 1e-10);

// Numerical counterpart of the closed form: integrates Y' = modulus(Y) from Y(0) = y0 + a t up to t and
// applies the same final relaxation factor exp(exp(-C t)). Valid while Y stays in (0, 1].
double oracle_bound(const OsgoodParams& params, double t, double tol = 1e-10);

struct TechnicalLemmaReport {
    double max_ratio = 0;            // max of F(choose_p(x), x) / (K x (1 + |ln x|)), K = e below e^-2, 3 above
    double identity_defect = 0;      // max relative |F(p_x, x) - (x + e x |ln x|)| on (0, e^-2]
    double continuity_defect = 0;    // jump of F(choose_p(x), x) across x = e^-2
    std::vector<int> n;              // Riemann partition sizes
    std::vector<double> riemann_defect;   // telescoped right-hand side minus [y]_0^t, per n
    double asymptotic_ratio = 0;     // F(p_x, x) / modulus(x, 1) at the smallest grid point
};

TechnicalLemmaReport lemma_techn_check(const std::vector<double>& x_grid, double a = 1e-3, double y0 = 1e-4,
                                       double t = 0.5, const std::vector<int>& partitions = {4, 16, 64});

// ---------------------------------------------------------------- stability experiment

struct Perturbation {
    bool omega0 = false;
    bool omega_in = false;
    bool circulation = false;   // initial circulation of every inner component
};

// Comma-separated list of omega0, omega_in, C0, or "all".
Perturbation parse_perturbation(const std::string& spec);
Scenario perturb_scenario(const Scenario& base, const Mesh& m, const Perturbation& p, double delta);

struct StabilityRung {
    double delta = 0;
    bool failed = false;
    std::string error;
    std::vector<double> t, z, y, u_l2, bound;   // per snapshot; y is the running max of z
    double boundary_abs = 0;   // int int |u~|^2 |g| over [0, T]
    double y_T = 0, bound_T = 0;
    double C_hat = 0;
    OsgoodParams params;
    bool below_bound = true;
    InequalityReport inequalities;
};

struct StabilityReport {
    double T = 0;
    std::vector<StabilityRung> rungs;
    double beta_fit = 0;     // slope of log y_T against log delta^2
    double beta_delta = 0;   // slope against log delta
    int fitted_rungs = 0;
    bool monotone = true;    // y_T increasing with delta over successful rungs
};

StabilityReport stability_experiment(const Scenario& base, const std::vector<double>& ladder, const Perturbation& p,
                                     int threads = 1);

// Columns: delta, T, y_T, bound_T, beta_fit, C_hat.
void write_stability_csv(std::ostream& out, const StabilityReport& rep);
// Columns: t, z, y, u_l2, bound.
void write_rung_csv(std::ostream& out, const StabilityRung& rung);

}  // namespace eulerss
