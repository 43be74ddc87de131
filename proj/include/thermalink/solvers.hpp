#pragma once

#include "thermalink/operators.hpp"

#include <vector>

namespace thermalink {

struct SteadyStateResult {
    Matrix rho;          // full-space steady state
    Matrix rho_qubits;   // reduced two-qubit state (equals rho when dim == 4)
    double concurrence = 0.0;
    double residual = 0.0;     // ||L rho||_max / ||L||_max
    int fock_cutoff = 0;       // 0 when the solve had no cavity factor
};

struct SteadyStateOptions {
    double tail_tol = 1e-8;    // stationary-cavity tail mass allowed above the cutoff
    int max_hilbert_dim = 4096;
    double residual_tol = 1e-8;
};

struct DegenerateSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Null vector of L with unit trace, via a trace-bordered linear solve.
// Dense rank-revealing QR for small dims, sparse LU above. Throws
// DegenerateSteadyStateError when the stationary subspace is not unique.
SteadyStateResult steady_state(const Superoperator& l);

// Convenience: build the full cascaded Liouvillian with a cutoff satisfying
// both the default heuristic and the tail bound, solve, and verify the tail
// of the computed state (throws CutoffTooSmallError on failure).
SteadyStateResult steady_state_full(const ModelParams& params,
                                    const SteadyStateOptions& opts = {});

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) integration of
// rho' = L rho, sampled at the strictly increasing grid t_grid
// (t_grid[0] >= 0; integration starts at t = 0 from rho0).
std::vector<Matrix> evolve(const Superoperator& l, const Matrix& rho0,
                           const std::vector<double>& t_grid, double rtol = 1e-8,
                           double atol = 1e-10);

// Trace over the trailing cavity factor of a (4 n_max) x (4 n_max) state.
Matrix partial_trace_cavity(const Matrix& rho_full, int n_max);

// Wootters concurrence of a two-qubit density matrix. Eigenvalues of rho in
// [-1e-9, 0) are clipped to zero; larger negativity raises.
double concurrence(const Matrix& rho_q);

// X-form shortcut valid for states diagonal in {|00>, |T>, |S>, |11>} with a
// dominant singlet population: max{0, pS - pT - 2 sqrt(p00 p11)}.
double concurrence_x_diagonal(double p00, double pT, double pS, double p11);

// Throws unless rho is Hermitian, unit-trace and PSD within tolerances.
void check_density_matrix(const Matrix& rho, double tol = 1e-8);

}  // namespace thermalink
