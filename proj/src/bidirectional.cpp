#include "thermalink/bidirectional.hpp"

#include <cmath>

namespace thermalink {

namespace {

void require_positions(const ModelParams& params) {
    if (!params.has_positions())
        throw std::invalid_argument("bidirectional model requires qubit positions k0z1, k0z2");
}

}  // namespace

BidirectionalCouplings bidirectional_couplings(const ModelParams& params) {
    require_positions(params);
    const std::array<double, 3> z{0.0, *params.k0z1, *params.k0z2};
    const std::array<double, 3> g{params.kappa, params.gamma1, params.gamma2};
    BidirectionalCouplings c;
    for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 3; ++l) {
            const double root = std::sqrt(g[j] * g[l]);
            c.coherent(j, l) = root * (std::sin(z[j] + z[l]) + std::sin(std::abs(z[j] - z[l]))) / 4.0;
            c.dissipative(j, l) = root * (std::cos(z[j] + z[l]) + std::cos(std::abs(z[j] - z[l]))) / 2.0;
        }
    }
    return c;
}

Superoperator build_bidirectional_liouvillian(const ModelParams& params) {
    params.validate();
    require_positions(params);
    const BidirectionalCouplings c = bidirectional_couplings(params);
    const int n_max = params.effective_fock_cutoff();
    const int dim = 4 * n_max;

    std::array<SparseMatrix, 3> jump{
        embed_cavity_op(annihilation(n_max), n_max),
        embed_qubit_op(qubit_sigma_minus(1), n_max),
        embed_qubit_op(qubit_sigma_minus(2), n_max),
    };

    // Coherent part: detunings plus the position-dependent exchange sum_jl J_jl c_j^+ c_l.
    Matrix h_q = 0.5 * params.delta1 * qubit_sigma_z(1) + 0.5 * params.delta2 * qubit_sigma_z(2);
    SparseMatrix h = embed_qubit_op(h_q, n_max);
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
            if (c.coherent(j, l) != 0.0)
                h += c.coherent(j, l) * SparseMatrix(jump[j].adjoint() * jump[l]);
    SparseMatrix lmat = hamiltonian_generator(h);

    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
            if (c.dissipative(j, l) != 0.0)
                lmat += c.dissipative(j, l) * dissipator(jump[j], jump[l]);

    // Thermal pumping of the filter cavity through the mirror.
    SparseMatrix ad = jump[0].adjoint();
    lmat += params.kappa * (params.n_th + 1.0) * dissipator(jump[0]) +
            params.kappa * params.n_th * dissipator(ad);

    if (params.gamma_phi > 0.0) {
        const SparseMatrix z1 = embed_qubit_op(qubit_sigma_z(1), n_max);
        const SparseMatrix z2 = embed_qubit_op(qubit_sigma_z(2), n_max);
        lmat += 0.5 * params.gamma_phi * (dissipator(z1) + dissipator(z2));
    }

    lmat.makeCompressed();
    return {dim, std::move(lmat)};
}

Vector bidirectional_dark_state(Complex alpha0, double delta_a, const ModelParams& params) {
    const double g = params.gamma();
    const Complex s_amp = std::sqrt(2.0 * params.kappa * g) * alpha0;
    const double norm2 = delta_a * delta_a + std::norm(s_amp);
    if (norm2 <= 0.0) throw std::invalid_argument("bidirectional_dark_state: zero norm");
    Vector psi = (I_UNIT * delta_a * ket00() + s_amp * singlet_ket()) / std::sqrt(norm2);
    return psi;
}

PhaseSpaceModel bidirectional_phase_space_model(const ModelParams& params) {
    params.validate();
    require_positions(params);
    const BidirectionalCouplings c = bidirectional_couplings(params);
    const double z1 = *params.k0z1;
    const double z2 = *params.k0z2;

    // Qubit-only part: shifted detunings, flip-flop exchange, collective
    // cosine-weighted decay.
    Matrix h = 0.5 * c.delta_prime(1, params) * qubit_sigma_z(1) +
               0.5 * c.delta_prime(2, params) * qubit_sigma_z(2) +
               c.j12() * (Matrix(qubit_sigma_plus(1) * qubit_sigma_minus(2)) +
                          Matrix(qubit_sigma_plus(2) * qubit_sigma_minus(1)));
    const Matrix l_cos = std::sqrt(params.gamma1) * std::cos(z1) * qubit_sigma_minus(1) +
                         std::sqrt(params.gamma2) * std::cos(z2) * qubit_sigma_minus(2);

    PhaseSpaceModel m;
    m.dim = 4;
    m.l_q = hamiltonian_generator(h) + dissipator(l_cos);
    if (params.gamma_phi > 0.0)
        m.l_q += 0.5 * params.gamma_phi *
                 (dissipator(qubit_sigma_z(1)) + dissipator(qubit_sigma_z(2)));

    // Reflected-wave drive at half the unidirectional weight:
    // H_drive = i sqrt(kappa)/2 (alpha^* Sigma - alpha Sigma^+), with
    // Sigma = sum_i sqrt(gamma_i) e^{-i k0 z_i} sigma_i^-.
    const Matrix sigma_low =
        std::sqrt(params.gamma1) * std::exp(-I_UNIT * z1) * qubit_sigma_minus(1) +
        std::sqrt(params.gamma2) * std::exp(-I_UNIT * z2) * qubit_sigma_minus(2);
    const Matrix sigma_raise = sigma_low.adjoint();
    const double w = 0.5 * std::sqrt(params.kappa);
    // alpha coefficient: w [mu, Sigma^+]; alpha^* coefficient: -w [mu, Sigma]
    m.l_plus = w * (spost(sigma_raise) - spre(sigma_raise));
    m.l_minus = w * (spre(sigma_low) - spost(sigma_low));
    m.kappa = params.kappa;
    m.n_th = params.n_th;
    m.provenance = "backaction-neglected";
    return m;
}

CfracSolution bidirectional_phase_space_steady(const ModelParams& params,
                                               const McfOptions& opts) {
    return mcf_steady(bidirectional_phase_space_model(params), opts);
}

}  // namespace thermalink
