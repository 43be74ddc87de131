#include "thermalink/analytic.hpp"

#include "thermalink/operators.hpp"
#include "thermalink/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace thermalink {

Matrix AnalyticPrediction::as_density_matrix() const {
    const Matrix u = triplet_singlet_basis();
    Vector diag(4);
    diag << p00, pT, pS, p11;
    return u * diag.asDiagonal() * u.adjoint();
}

AnalyticPrediction markov_steady(double n_th) {
    if (n_th < 0.0) throw std::invalid_argument("markov_steady: n_th must be >= 0");
    const double d = (1.0 + 2.0 * n_th) * (1.0 + 2.0 * n_th);
    AnalyticPrediction p;
    p.p00 = (n_th + 1.0) * (n_th + 1.0) / d;
    p.pT = p.pS = n_th * (n_th + 1.0) / d;
    p.p11 = n_th * n_th / d;
    p.concurrence = 0.0;
    p.regime = "markov";
    return p;
}

AnalyticPrediction quasistatic_steady(double phi_over_gamma) {
    if (phi_over_gamma < 0.0) throw std::invalid_argument("quasistatic_steady: flux must be >= 0");
    AnalyticPrediction p;
    const double u = phi_over_gamma > 0.0 ? upsilon(phi_over_gamma) : 1.0;
    p.p00 = u;
    p.pS = 1.0 - u;
    p.pT = p.p11 = 0.0;
    p.concurrence = 1.0 - u;
    p.regime = "quasistatic";
    return p;
}

AnalyticPrediction bourret_steady_lowest(const ModelParams& params) {
    const double g = params.gamma();
    const double k = params.kappa;
    const double phi = params.photon_flux();
    AnalyticPrediction p;
    p.regime = "bourret-lowest";
    if (phi == 0.0) {
        p.p00 = 1.0;
        return p;
    }
    p.p11 = 64.0 * k * phi * phi / (g * (g + 8.0 * phi) * (9.0 * g + 8.0 * phi));
    p.pT = 8.0 * k * phi / (g * (g + 8.0 * phi));
    p.pS = 8.0 * phi / (g + 8.0 * phi) -
           8.0 * k * phi * (27.0 * g * g + 112.0 * g * phi + 192.0 * phi * phi) /
               (g * (g + 8.0 * phi) * (g + 8.0 * phi) * (9.0 * g + 8.0 * phi));
    p.p00 = g / (g + 8.0 * phi);
    p.concurrence = std::max(0.0, p.pS - p.pT - 2.0 * std::sqrt(std::max(0.0, p.p00 * p.p11)));
    return p;
}

AnalyticPrediction bourret_steady_full(const ModelParams& params) {
    const double g = params.gamma();
    const double k = params.kappa;
    const double phi = params.photon_flux();
    const double gp2k = g + 2.0 * k;
    const double g3p2k = 3.0 * g + 2.0 * k;
    const double norm = gp2k * (gp2k + 8.0 * phi) * (g3p2k * g3p2k + 8.0 * phi * gp2k);
    AnalyticPrediction p;
    p.regime = "bourret-full";
    p.p11 = 64.0 * k * phi * phi * (g + k) / norm;
    p.pT = 8.0 * k * phi * (g3p2k * g3p2k + 8.0 * phi * (g + k)) / norm;
    p.pS = 8.0 * phi * ((g + k) * g3p2k * g3p2k + 8.0 * phi * (g * g + k * k + g * k)) / norm;
    p.p00 = (64.0 * k * phi * phi * (g + k) + 8.0 * phi * gp2k * gp2k * gp2k +
             gp2k * gp2k * g3p2k * g3p2k) /
            norm;
    p.concurrence = std::max(0.0, p.pS - p.pT - 2.0 * std::sqrt(std::max(0.0, p.p00 * p.p11)));
    return p;
}

double bourret_concurrence_unclipped(const ModelParams& params) {
    const double g = params.gamma();
    const double k = params.kappa;
    const double phi = params.photon_flux();
    if (phi == 0.0) return 0.0;
    const double a = g + 8.0 * phi;
    const double b = 9.0 * g + 8.0 * phi;
    const double t3 = 3.0 * g + 8.0 * phi;
    return 8.0 * phi / a - 16.0 * phi * std::sqrt(k) / (a * std::sqrt(b)) -
           32.0 * k * phi * t3 * t3 / (g * a * a * b);
}

double bourret_concurrence(const ModelParams& params) {
    return std::max(0.0, bourret_concurrence_unclipped(params));
}

double kappa_max(const ModelParams& params) {
    if (!(params.n_th > 0.0)) throw std::invalid_argument("kappa_max: n_th must be > 0");
    const double g = params.gamma();
    auto conc = [&](double kappa) {
        ModelParams p = params;
        p.kappa = kappa;
        return bourret_concurrence_unclipped(p);  // phi = kappa n_th / 2 tracks kappa
    };
    double lo = 1e-9 * g;
    double hi = 1.0 * g;
    double flo = conc(lo);
    double fhi = conc(hi);
    if (!(flo > 0.0) || !(fhi < 0.0))
        throw std::runtime_error("kappa_max: concurrence does not change sign on (0, gamma)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = conc(mid);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * g) break;
    }
    return 0.5 * (lo + hi);
}

CoherencePair coherence_functions(double kappa, double tau) {
    if (tau < 0.0) throw std::invalid_argument("coherence_functions: tau must be >= 0");
    CoherencePair c;
    c.g1 = std::exp(-kappa * tau);
    c.g2 = 1.0 + std::exp(-2.0 * kappa * tau);
    return c;
}

double thermal_occupation(double temperature_kelvin, double frequency_hz) {
    if (!(temperature_kelvin > 0.0) || !(frequency_hz > 0.0))
        throw std::invalid_argument("thermal_occupation: T and f must be > 0");
    // CODATA / exact SI values.
    constexpr double hbar = 1.054571817e-34;   // J s
    constexpr double k_boltzmann = 1.380649e-23;  // J / K
    const double x = hbar * 2.0 * M_PI * frequency_hz / (k_boltzmann * temperature_kelvin);
    return 1.0 / std::expm1(x);
}

}  // namespace thermalink
