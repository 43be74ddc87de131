#pragma once

#include "thermalink/cfrac.hpp"
#include "thermalink/operators.hpp"

namespace thermalink {

// Position-dependent couplings of the semi-infinite (mirror-terminated)
// waveguide. Indices {0, 1, 2} are the filter cavity (z0 = 0, gamma0 = kappa)
// and the two qubits. Both matrices are real symmetric; the dissipative
// matrix is the rank-one Gram form Gamma_jl = sqrt(g_j g_l) cos(k0 z_j) cos(k0 z_l),
// hence positive semidefinite for every placement.
struct BidirectionalCouplings {
    Eigen::Matrix3d coherent;     // J_{j,l}
    Eigen::Matrix3d dissipative;  // Gamma_{j,l}

    double j12() const { return coherent(1, 2); }
    double j11() const { return coherent(1, 1); }
    double j22() const { return coherent(2, 2); }
    // Position-shifted detunings Delta'_i = Delta_i + J_ii.
    double delta_prime(int i, const ModelParams& p) const {
        return (i == 1 ? p.delta1 : p.delta2) + coherent(i, i);
    }
};

BidirectionalCouplings bidirectional_couplings(const ModelParams& params);

// Exact master equation of the semi-infinite waveguide on qubits (x) cavity,
// including the thermal pumping of the filter cavity.
Superoperator build_bidirectional_liouvillian(const ModelParams& params);

// Adiabatic dark state for a frozen field amplitude:
// (i delta_a |00> + sqrt(2 kappa gamma) alpha0 |S>) / norm.
Vector bidirectional_dark_state(Complex alpha0, double delta_a, const ModelParams& params);

// Phase-space model with the qubit backaction on the cavity dropped; feeds
// the continued-fraction solver. Provenance is marked "backaction-neglected".
PhaseSpaceModel bidirectional_phase_space_model(const ModelParams& params);

CfracSolution bidirectional_phase_space_steady(const ModelParams& params,
                                               const McfOptions& opts = {});

}  // namespace thermalink
