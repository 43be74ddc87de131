#include "thermalink/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace thermalink {

namespace {

Matrix identity(int n) { return Matrix::Identity(n, n); }

}  // namespace

Matrix pauli_minus() {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

Matrix pauli_z() {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return s;
}

Matrix qubit_sigma_minus(int which) {
    if (which == 1) return kron(pauli_minus(), identity(2));
    if (which == 2) return kron(identity(2), pauli_minus());
    throw std::invalid_argument("qubit index must be 1 or 2");
}

Matrix qubit_sigma_plus(int which) { return qubit_sigma_minus(which).adjoint(); }

Matrix qubit_sigma_z(int which) {
    if (which == 1) return kron(pauli_z(), identity(2));
    if (which == 2) return kron(identity(2), pauli_z());
    throw std::invalid_argument("qubit index must be 1 or 2");
}

Matrix collective_lowering() { return qubit_sigma_minus(1) + qubit_sigma_minus(2); }

Matrix collective_sz() { return qubit_sigma_z(1) + qubit_sigma_z(2); }

Matrix annihilation(int n_max) {
    Matrix a = Matrix::Zero(n_max, n_max);
    for (int n = 1; n < n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Vector ket00() {
    Vector v = Vector::Zero(4);
    v(0) = 1.0;
    return v;
}

Vector ket11() {
    Vector v = Vector::Zero(4);
    v(3) = 1.0;
    return v;
}

Vector triplet_ket() {
    Vector v = Vector::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);
    return v;
}

Vector singlet_ket() {
    Vector v = Vector::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return v;
}

SparseMatrix embed_qubit_op(const Matrix& q4, int n_max) {
    return kron(to_sparse(q4), sparse_identity(n_max));
}

SparseMatrix embed_cavity_op(const Matrix& c, int n_max) {
    if (c.rows() != n_max) throw std::invalid_argument("cavity operator dimension mismatch");
    return kron(sparse_identity(4), to_sparse(c));
}

// --- superoperator primitives ----------------------------------------------

Matrix spre(const Matrix& a) { return kron(identity(static_cast<int>(a.rows())), a); }

Matrix spost(const Matrix& a) {
    return kron(a.transpose(), identity(static_cast<int>(a.rows())));
}

Matrix hamiltonian_generator(const Matrix& h) {
    return -I_UNIT * (spre(h) - spost(h));
}

Matrix dissipator(const Matrix& a) { return dissipator(a, a); }

Matrix dissipator(const Matrix& a, const Matrix& b) {
    const Matrix bda = b.adjoint() * a;
    return kron(b.conjugate(), a) - 0.5 * (spre(bda) + spost(bda));
}

SparseMatrix spre(const SparseMatrix& a) {
    return kron(sparse_identity(static_cast<int>(a.rows())), a);
}

SparseMatrix spost(const SparseMatrix& a) {
    SparseMatrix at = a.transpose();
    return kron(at, sparse_identity(static_cast<int>(a.rows())));
}

SparseMatrix hamiltonian_generator(const SparseMatrix& h) {
    return (-I_UNIT * (spre(h) - spost(h))).pruned();
}

SparseMatrix dissipator(const SparseMatrix& a) { return dissipator(a, a); }

SparseMatrix dissipator(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix bda = b.adjoint() * a;
    SparseMatrix bconj = b.conjugate();
    return (kron(bconj, a) - Complex(0.5) * (spre(bda) + spost(bda))).pruned();
}

Matrix Superoperator::apply(const Matrix& rho) const {
    return unvec(mat * vec(rho), dim);
}

Matrix Superoperator::dense() const {
    if (static_cast<long>(dim) * dim > 8192)
        throw std::runtime_error("Superoperator::dense: dimension too large");
    return Matrix(mat);
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
    if (dim != other.dim) throw std::invalid_argument("Superoperator dimension mismatch");
    mat += other.mat;
    return *this;
}

// --- network Liouvillians ----------------------------------------------------

Superoperator build_thermal_cavity_liouvillian(double kappa, double n_th, int n_max) {
    SparseMatrix a = to_sparse(annihilation(n_max));
    SparseMatrix ad = a.adjoint();
    SparseMatrix l = kappa * (n_th + 1.0) * dissipator(a) + kappa * n_th * dissipator(ad) +
                     kappa * dissipator(a);
    return {n_max, std::move(l)};
}

Superoperator build_full_liouvillian(const ModelParams& params) {
    params.validate();
    const int n_max = params.effective_fock_cutoff();
    const int dim = 4 * n_max;

    const SparseMatrix a = embed_cavity_op(annihilation(n_max), n_max);
    const SparseMatrix ad = a.adjoint();
    const SparseMatrix s1m = embed_qubit_op(qubit_sigma_minus(1), n_max);
    const SparseMatrix s2m = embed_qubit_op(qubit_sigma_minus(2), n_max);
    const SparseMatrix s1p = s1m.adjoint();
    const SparseMatrix s2p = s2m.adjoint();

    // Thermal source, coupled to the hot and the cold reservoir with equal rates.
    SparseMatrix l = params.kappa * (params.n_th + 1.0) * dissipator(a) +
                     params.kappa * params.n_th * dissipator(ad) + params.kappa * dissipator(a);

    // Bare qubit dynamics.
    l += hamiltonian_generator(embed_qubit_op(
        0.5 * params.delta1 * qubit_sigma_z(1) + 0.5 * params.delta2 * qubit_sigma_z(2), n_max));
    l += params.gamma1 * dissipator(s1m) + params.gamma2 * dissipator(s2m);

    // Cascaded source -> target coupling: [src rho, tgt+] + [tgt-, rho src+]
    //   = src rho tgt+ - tgt+ src rho + tgt- rho src+ - rho src+ tgt-.
    auto cascade_pair = [&](const SparseMatrix& src, const SparseMatrix& tgt_m,
                            const SparseMatrix& tgt_p) -> SparseMatrix {
        SparseMatrix srcd = src.adjoint();
        return (kron(SparseMatrix(tgt_p.transpose()), src) - spre(SparseMatrix(tgt_p * src)) +
                kron(SparseMatrix(srcd.transpose()), tgt_m) - spost(SparseMatrix(srcd * tgt_m)))
            .pruned();
    };
    l += std::sqrt(params.gamma1 * params.kappa) * cascade_pair(a, s1m, s1p);
    l += std::sqrt(params.gamma2 * params.kappa) * cascade_pair(a, s2m, s2p);

    // Qubit 1 -> qubit 2 cascade, attenuated by waveguide loss.
    l += std::sqrt(params.gamma1 * params.gamma2 * (1.0 - params.p_loss)) *
         cascade_pair(s1m, s2m, s2p);

    if (params.gamma_phi > 0.0) {
        const SparseMatrix z1 = embed_qubit_op(qubit_sigma_z(1), n_max);
        const SparseMatrix z2 = embed_qubit_op(qubit_sigma_z(2), n_max);
        l += 0.5 * params.gamma_phi * (dissipator(z1) + dissipator(z2));
    }

    l.makeCompressed();
    return {dim, std::move(l)};
}

Superoperator build_regrouped_liouvillian(const ModelParams& params) {
    params.validate();
    const double gamma = params.gamma();  // throws on asymmetry
    const int n_max = params.effective_fock_cutoff();
    const int dim = 4 * n_max;

    const SparseMatrix a = embed_cavity_op(annihilation(n_max), n_max);
    const SparseMatrix ad = a.adjoint();
    const SparseMatrix sm = embed_qubit_op(collective_lowering(), n_max);
    const SparseMatrix sp = sm.adjoint();

    SparseMatrix l = params.kappa * (params.n_th + 1.0) * dissipator(a) +
                     params.kappa * params.n_th * dissipator(ad) + params.kappa * dissipator(a);

    // L_q = -i [H_q, .] + gamma D[S^-]
    l += hamiltonian_generator(embed_qubit_op(qubit_hamiltonian(params), n_max));
    l += gamma * dissipator(sm);

    // L_drive = sqrt(gamma kappa) ([a rho, S+] + [S-, rho a+])
    SparseMatrix drive = kron(SparseMatrix(sp.transpose()), a) - spre(SparseMatrix(sp * a)) +
                         kron(SparseMatrix(ad.transpose()), sm) - spost(SparseMatrix(ad * sm));
    l += std::sqrt(gamma * params.kappa) * drive.pruned();

    if (params.gamma_phi > 0.0) {
        const SparseMatrix z1 = embed_qubit_op(qubit_sigma_z(1), n_max);
        const SparseMatrix z2 = embed_qubit_op(qubit_sigma_z(2), n_max);
        l += 0.5 * params.gamma_phi * (dissipator(z1) + dissipator(z2));
    }

    l.makeCompressed();
    return {dim, std::move(l)};
}

Superoperator build_markov_liouvillian(const ModelParams& params) {
    params.validate();
    const double gamma = params.gamma();
    const Matrix sm = collective_lowering();
    const Matrix sp = sm.adjoint();
    Matrix l = hamiltonian_generator(qubit_hamiltonian(params)) +
               gamma * (params.n_th + 1.0) * dissipator(sm) +
               gamma * params.n_th * dissipator(sp);
    return {4, to_sparse(l)};
}

// --- qubit-space generators --------------------------------------------------

Matrix cascade_hamiltonian(double gamma) {
    return I_UNIT * 0.5 * gamma *
           (Matrix(qubit_sigma_plus(1) * qubit_sigma_minus(2)) -
            Matrix(qubit_sigma_minus(1) * qubit_sigma_plus(2)));
}

Matrix qubit_hamiltonian(const ModelParams& params) {
    return 0.5 * params.delta1 * qubit_sigma_z(1) + 0.5 * params.delta2 * qubit_sigma_z(2) +
           cascade_hamiltonian(std::sqrt(params.gamma1 * params.gamma2 * (1.0 - params.p_loss)));
}

Matrix qubit_cascade_generator(const ModelParams& params) {
    const Matrix s1m = qubit_sigma_minus(1);
    const Matrix s2m = qubit_sigma_minus(2);
    // Loss-attenuated unidirectional coupling, written as a Lindblad pair:
    // D[sqrt(g1 (1-p)) s1- + sqrt(g2) s2-] + p g1 D[s1-] plus the coherent
    // exchange part folded into H_q.
    const double g1_kept = params.gamma1 * (1.0 - params.p_loss);
    const Matrix l_casc = std::sqrt(g1_kept) * s1m + std::sqrt(params.gamma2) * s2m;
    Matrix gen = hamiltonian_generator(qubit_hamiltonian(params)) + dissipator(l_casc) +
                 params.gamma1 * params.p_loss * dissipator(s1m);
    if (params.gamma_phi > 0.0)
        gen += 0.5 * params.gamma_phi * (dissipator(qubit_sigma_z(1)) + dissipator(qubit_sigma_z(2)));
    return gen;
}

Matrix drive_plus_generator(const ModelParams& params) {
    const Matrix c = std::sqrt(params.gamma1 * params.kappa) * qubit_sigma_plus(1) +
                     std::sqrt(params.gamma2 * params.kappa) * qubit_sigma_plus(2);
    return spost(c) - spre(c);  // mu -> [mu, c]
}

Matrix drive_minus_generator(const ModelParams& params) {
    const Matrix c = std::sqrt(params.gamma1 * params.kappa) * qubit_sigma_minus(1) +
                     std::sqrt(params.gamma2 * params.kappa) * qubit_sigma_minus(2);
    return spre(c) - spost(c);  // mu -> -[mu, c]
}

Matrix qubit_drive_hamiltonian(Complex alpha, const ModelParams& params) {
    const Matrix cp = std::sqrt(params.gamma1 * params.kappa) * qubit_sigma_plus(1) +
                      std::sqrt(params.gamma2 * params.kappa) * qubit_sigma_plus(2);
    const Matrix cm = cp.adjoint();
    return qubit_hamiltonian(params) - I_UNIT * (alpha * cp - std::conj(alpha) * cm);
}

// --- triplet-singlet decomposition -------------------------------------------

Matrix triplet_singlet_basis() {
    Matrix u = Matrix::Zero(4, 4);
    u.col(0) = ket00();
    u.col(1) = triplet_ket();
    u.col(2) = singlet_ket();
    u.col(3) = ket11();
    return u;
}

TripletSingletDecomposition triplet_singlet_transform(const Matrix& rho_q) {
    if (rho_q.rows() != 4 || rho_q.cols() != 4)
        throw std::invalid_argument("triplet_singlet_transform: expected a 4x4 state");
    if (!is_hermitian(rho_q, 1e-8))
        throw std::invalid_argument("triplet_singlet_transform: non-Hermitian input");
    if (std::abs(rho_q.trace() - Complex(1.0)) > 1e-8)
        throw std::invalid_argument("triplet_singlet_transform: non-unit trace");

    const Matrix u = triplet_singlet_basis();
    const Matrix r = u.adjoint() * rho_q * u;  // {|00>, |T>, |S>, |11>} basis
    TripletSingletDecomposition d;
    d.p00 = r(0, 0).real();
    d.pT = r(1, 1).real();
    d.pS = r(2, 2).real();
    d.p11 = r(3, 3).real();
    d.chi_ST = r(2, 1);
    d.chi_0S = r(0, 2);
    d.chi_0T = r(0, 1);
    return d;
}

}  // namespace thermalink
