#pragma once

#include "thermalink/linalg.hpp"
#include "thermalink/model.hpp"

#include <string>

namespace thermalink {

// Closed-form steady-state prediction in the {|00>, |T>, |S>, |11>} basis.
struct AnalyticPrediction {
    double p00 = 0, pT = 0, pS = 0, p11 = 0;
    double concurrence = 0;
    std::string regime;  // markov | quasistatic | bourret-lowest | bourret-full

    Matrix as_density_matrix() const;  // diagonal in the triplet-singlet basis
};

// Broadband-limit product state: each qubit thermal, no entanglement.
AnalyticPrediction markov_steady(double n_th);

// Quasistatic (kappa -> 0) average over the dark-state manifold:
// p00 = Upsilon(phi/gamma), pS = 1 - Upsilon, C = 1 - Upsilon.
AnalyticPrediction quasistatic_steady(double phi_over_gamma);

// Decorrelation (Bourret) approximation steady states.
AnalyticPrediction bourret_steady_lowest(const ModelParams& params);
AnalyticPrediction bourret_steady_full(const ModelParams& params);

// Three-term closed form for the Bourret concurrence (clipped at zero).
double bourret_concurrence(const ModelParams& params);
double bourret_concurrence_unclipped(const ModelParams& params);

// Largest bandwidth with nonvanishing steady-state entanglement, found by
// bisection of the unclipped Bourret concurrence over kappa/gamma in (0, 1)
// at fixed n_th. Falls in [0.18, 0.25) for n_th of order 1..10.
double kappa_max(const ModelParams& params);

// First- and second-order coherence of the filtered source output:
// g1 = e^{-kappa tau}, g2 = 1 + e^{-2 kappa tau}.
struct CoherencePair {
    double g1 = 0, g2 = 0;
};
CoherencePair coherence_functions(double kappa, double tau);

// Bose-Einstein occupation at temperature T (kelvin) and frequency f (Hz).
double thermal_occupation(double temperature_kelvin, double frequency_hz);

}  // namespace thermalink
