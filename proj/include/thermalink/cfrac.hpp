#pragma once

#include "thermalink/operators.hpp"

#include <functional>
#include <string>
#include <vector>

namespace thermalink {

// Phase-space description of the driven qubit subsystem: the equation of
// motion (d/dt + Lambda) mu = (L_q + alpha L_+ + alpha^* L_-) mu expanded in
// the eigenmodes of the Ornstein-Uhlenbeck generator Lambda. The generators
// act on the vectorized qubit state (dim^2 x dim^2 dense matrices).
struct PhaseSpaceModel {
    int dim = 4;      // qubit Hilbert dimension (4, or 3 in three-level mode)
    Matrix l_q;       // drift generator
    Matrix l_plus;    // coefficient of alpha
    Matrix l_minus;   // coefficient of alpha^*
    double kappa = 0;
    double n_th = 0;
    std::string provenance = "cascaded";  // approximation bookkeeping
};

PhaseSpaceModel cascaded_phase_space_model(const ModelParams& params);

// Three-level variant in the {|00>, |S>, |T>} subspace (transitions to |11>
// omitted).
PhaseSpaceModel three_level_phase_space_model(const ModelParams& params);

struct McfOptions {
    int n_max = 0;          // 0 = start at ceil(sqrt(n_th)) + 8, then escalate
    int n_max_ceiling = 8192;  // the 1e-8 standard needs n_max ~ 3.6 sqrt(n_th)
    double convergence_tol = 1e-8;  // population shift allowed under n_max -> n_max + 8
    int depth_override = -1;        // >= 0: fixed truncation, no escalation
    bool include_m2 = true;  // keep the eliminated m = +-2 blocks in A_n, B_n, C_n
    bool keep_modes = false; // retain the sigma^n blocks in the solution
};

struct CfracSolution {
    Matrix rho_q;            // dim x dim steady state (mu^{0,0})
    int n_max = 0;
    bool converged = false;
    double tail_ratio = 0.0;  // ||sigma^{n_max}|| / ||sigma^0||
    double min_eigenvalue = 0.0;  // negativity diagnostic of the raw mu^{0,0}
    double p00 = 0, pT = 0, pS = 0, p11 = 0;
    double concurrence = 0.0;  // evaluated on the clipped, renormalized state
    std::string provenance;
    std::vector<Matrix> modes;  // sigma^n blocks as dim^2 x 3 stacked columns (optional)
};

struct CfracConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Steady state via the matrix continued fraction over the mode hierarchy
// sigma^n = (mu^{n,0}, mu^{n,1}, mu^{n,-1}).
CfracSolution mcf_steady(const PhaseSpaceModel& model, const McfOptions& opts = {});
CfracSolution mcf_steady(const ModelParams& params, const McfOptions& opts = {});

// --- scalar continued fractions ---------------------------------------------

// Three-term recurrence a_n X_n = b_n X_{n-1} + c_n X_{n+1} + Y0 d_{n,0} + Y1 d_{n,1}
// solved by backward recursion: X_0 = F1 (Y0 + F2 Y1).
struct ScalarRecurrence {
    std::function<double(int)> a, b, c;
};

struct ScalarCfResult {
    double x0 = 0;
    double f1 = 0, f2 = 0;
    int depth = 0;
    bool converged = false;  // stable to 1e-12 under depth doubling
};

ScalarCfResult scalar_cf_eval(const ScalarRecurrence& rec, double y0, double y1, int depth);
// Automatic depth escalation until the doubling test passes.
ScalarCfResult scalar_cf_eval_adaptive(const ScalarRecurrence& rec, double y0, double y1,
                                       int initial_depth = 64);

// The decoupled singlet/triplet recurrence of the quasistatic expansion,
// shared by both populations (they differ only in their source terms).
ScalarRecurrence population_recurrence(double gamma, double kappa, double phi);

struct ThreeLevelResult {
    double pS = 0, pT = 0;
    double concurrence = 0;
    int depth = 0;
    bool converged = false;
};

// Singlet/triplet populations from the scalar continued fractions
// (numerically evaluated F1, F2); depth 0 = automatic.
ThreeLevelResult three_level_cf_steady(const ModelParams& params, int depth = 0);

// --- closed forms -------------------------------------------------------------

struct ClosedFormPopulations {
    double phi_eff = 0;            // renormalized flux phi gamma^2/(gamma^2 + 24 kappa phi)
    double pS_lowest = 0, pT_lowest = 0;   // lowest order in kappa/gamma
    double pS_full = 0, pT_full = 0;       // with the (1 + 3 kappa/gamma) corrections
};

ClosedFormPopulations closed_form_populations(const ModelParams& params);
double closed_form_concurrence(const ModelParams& params);

struct OptimalOccupation {
    double n_star_analytic = 0;   // gamma^2 / (12 kappa^2)
    double c_star_analytic = 0;   // 1 - 2 Upsilon(gamma / (48 kappa))
    double n_star_numeric = 0;    // argmax of the closed-form concurrence
    double c_star_numeric = 0;
};

OptimalOccupation optimal_occupation(const ModelParams& params);

}  // namespace thermalink
