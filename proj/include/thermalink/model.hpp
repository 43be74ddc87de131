#pragma once

#include <optional>
#include <stdexcept>

namespace thermalink {

// Physical configuration of the thermally driven two-qubit network.
// All rates are angular frequencies in a common (arbitrary) unit; the
// filter-cavity linewidth is 2*kappa and the source emits a photon flux
// of phi = kappa * n_th / 2 into the channel.
struct ModelParams {
    double gamma1 = 1.0;   // decay rate of qubit 1 into the waveguide
    double gamma2 = 1.0;   // decay rate of qubit 2
    double kappa = 0.1;    // half the filter-cavity bandwidth
    double n_th = 0.0;     // mean thermal occupation of the hot reservoir
    double delta1 = 0.0;   // qubit detunings from the cavity resonance
    double delta2 = 0.0;
    double gamma_phi = 0.0;  // pure dephasing rate 1/T_phi
    double p_loss = 0.0;     // photon loss probability between the qubits
    int fock_cutoff = 0;     // cavity truncation; 0 = choose automatically
    std::optional<double> k0z1;  // qubit positions (radians) for the
    std::optional<double> k0z2;  // semi-infinite bidirectional waveguide

    void validate() const;

    bool symmetric() const { return gamma1 == gamma2; }

    // Symmetric decay rate; only meaningful when gamma1 == gamma2.
    double gamma() const;

    double delta_a() const { return 0.5 * (delta1 - delta2); }
    double delta_s() const { return 0.5 * (delta1 + delta2); }

    // Mean photon flux entering the channel.
    double photon_flux() const { return kappa * n_th / 2.0; }

    bool has_positions() const { return k0z1.has_value() && k0z2.has_value(); }

    // Default truncation heuristic; the actual cutoff used for exact
    // solves additionally enforces a thermal-tail bound (see fock_cutoff_for_tail).
    int default_fock_cutoff() const;

    int effective_fock_cutoff() const {
        return fock_cutoff > 0 ? fock_cutoff : default_fock_cutoff();
    }
};

// Convenience for sweeps parameterized by flux instead of occupation.
ModelParams params_from_flux(double gamma, double kappa, double phi);

// Smallest number of retained Fock states such that the stationary cavity
// distribution (thermal, mean n_th/2) has tail mass below `tol`.
int fock_cutoff_for_tail(double n_th, double tol);

// Tail mass of a thermal distribution with mean nbar above cutoff (states
// 0..cutoff-1 retained).
double thermal_tail_mass(double nbar, int cutoff);

struct CutoffTooSmallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AsymmetricGammaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace thermalink
