#include "thermalink/model.hpp"

#include <cmath>
#include <string>

namespace thermalink {

void ModelParams::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("ModelParams: " + what); };
    for (double r : {gamma1, gamma2, kappa, n_th, gamma_phi}) {
        if (!std::isfinite(r)) bad("non-finite rate");
        if (r < 0.0) bad("negative rate");
    }
    if (!std::isfinite(delta1) || !std::isfinite(delta2)) bad("non-finite detuning");
    if (!(p_loss >= 0.0 && p_loss <= 1.0)) bad("p_loss outside [0, 1]");
    if (fock_cutoff != 0 && fock_cutoff < 2) bad("fock_cutoff must be >= 2");
    if (k0z1.has_value() != k0z2.has_value()) bad("both or neither qubit position must be set");
    if (has_positions() && (!std::isfinite(*k0z1) || !std::isfinite(*k0z2))) bad("non-finite position");
}

double ModelParams::gamma() const {
    if (!symmetric())
        throw AsymmetricGammaError("symmetric configuration required: gamma1 != gamma2");
    return gamma1;
}

int ModelParams::default_fock_cutoff() const {
    const double nbar = n_th / 2.0;
    return std::max(2, static_cast<int>(std::ceil(nbar + 6.0 * std::sqrt(nbar + 1.0))));
}

ModelParams params_from_flux(double gamma, double kappa, double phi) {
    ModelParams p;
    p.gamma1 = p.gamma2 = gamma;
    p.kappa = kappa;
    p.n_th = (kappa > 0.0) ? 2.0 * phi / kappa : 0.0;
    return p;
}

double thermal_tail_mass(double nbar, int cutoff) {
    if (nbar <= 0.0) return 0.0;
    // Geometric distribution p(n) = nbar^n / (nbar+1)^(n+1).
    return std::exp(cutoff * std::log(nbar / (nbar + 1.0)));
}

int fock_cutoff_for_tail(double n_th, double tol) {
    const double nbar = n_th / 2.0;
    if (nbar <= 0.0) return 2;
    const int n = static_cast<int>(std::ceil(std::log(tol) / std::log(nbar / (nbar + 1.0))));
    return std::max(2, n);
}

}  // namespace thermalink
