#pragma once

#include "thermalink/linalg.hpp"
#include "thermalink/model.hpp"

namespace thermalink {

// Hilbert-space conventions, fixed across the project:
//   - qubit basis |0> (ground), |1> (excited); sigma^- = |0><1|
//   - two-qubit product index 2*i1 + i2 (qubit 1 major)
//   - full space qubit1 (x) qubit2 (x) cavity, index 4-block * n_max + fock
// The cavity is the trailing factor so the partial trace is a block sum.

// --- elementary operators -------------------------------------------------

Matrix pauli_minus();            // 2x2 sigma^-
Matrix pauli_z();                // 2x2 sigma^z
Matrix qubit_sigma_minus(int which);  // 4x4 two-qubit space, which in {1,2}
Matrix qubit_sigma_plus(int which);
Matrix qubit_sigma_z(int which);
Matrix collective_lowering();    // S^- = sigma1^- + sigma2^-
Matrix collective_sz();          // S^z = sigma1^z + sigma2^z
Matrix annihilation(int n_max);  // cavity a, n_max x n_max

Vector ket00();
Vector ket11();
Vector triplet_ket();            // (|01> + |10>)/sqrt(2)
Vector singlet_ket();            // (|01> - |10>)/sqrt(2)

// Embedding into the 4*n_max product space.
SparseMatrix embed_qubit_op(const Matrix& q4, int n_max);
SparseMatrix embed_cavity_op(const Matrix& c, int n_max);

// --- superoperator primitives (column-stacking convention) -----------------

// dense variants operate on small spaces (the 4-dim qubit space of the
// phase-space machinery); sparse variants build the full-network Liouvillians.
Matrix spre(const Matrix& a);                       // rho -> a rho
Matrix spost(const Matrix& a);                      // rho -> rho a
Matrix hamiltonian_generator(const Matrix& h);      // rho -> -i [h, rho]
Matrix dissipator(const Matrix& a);                 // D[a]
Matrix dissipator(const Matrix& a, const Matrix& b);  // rho -> a rho b^+ - {b^+ a, rho}/2

SparseMatrix spre(const SparseMatrix& a);
SparseMatrix spost(const SparseMatrix& a);
SparseMatrix hamiltonian_generator(const SparseMatrix& h);
SparseMatrix dissipator(const SparseMatrix& a);
SparseMatrix dissipator(const SparseMatrix& a, const SparseMatrix& b);

// A Liouvillian (or any linear map on density matrices) acting on the
// column-stacked state. Stored sparse; dense() is guarded against large dims.
struct Superoperator {
    int dim = 0;        // Hilbert-space dimension D; mat is D^2 x D^2
    SparseMatrix mat;

    Matrix apply(const Matrix& rho) const;
    Matrix dense() const;
    Superoperator& operator+=(const Superoperator& other);
};

// --- network Liouvillians ---------------------------------------------------

// Thermal filter cavity alone (dim = n_max): relaxes to <a^+ a> = n_th/2.
Superoperator build_thermal_cavity_liouvillian(double kappa, double n_th, int n_max);

// Full cascaded network on qubit1 (x) qubit2 (x) cavity, including optional
// pure dephasing and the loss-modified qubit-qubit cascade.
Superoperator build_full_liouvillian(const ModelParams& params);

// Same generator regrouped as L_th + L_q + L_drive with the collective jump
// S^- and the coherent exchange Hamiltonian; requires gamma1 == gamma2.
Superoperator build_regrouped_liouvillian(const ModelParams& params);

// Broadband (Markov) limit on the two-qubit space (dim = 4).
Superoperator build_markov_liouvillian(const ModelParams& params);

// --- qubit-space generators for the phase-space representation -------------
// These are dense 16x16 maps on the vectorized two-qubit state.

// Dissipative qubit generator of the cascaded network: local decay, the
// unidirectional qubit-qubit coupling (with loss factor), detunings and
// dephasing. Equals -i[H_q, .] + gamma D[S^-] in the symmetric lossless case.
Matrix qubit_cascade_generator(const ModelParams& params);

// Drive generators: mu -> sum_i sqrt(gamma_i kappa) [mu, sigma_i^+]  (plus)
//                   mu -> -sum_i sqrt(gamma_i kappa) [mu, sigma_i^-] (minus)
Matrix drive_plus_generator(const ModelParams& params);
Matrix drive_minus_generator(const ModelParams& params);

// Coherent-drive Hamiltonian for a frozen field amplitude alpha:
// H_q - i sqrt(kappa) [alpha (sqrt(g1) s1+ + sqrt(g2) s2+) - h.c.]
Matrix qubit_drive_hamiltonian(Complex alpha, const ModelParams& params);

// Two-qubit Hamiltonian H_q = H_1 + H_2 + H_casc (4x4).
Matrix qubit_hamiltonian(const ModelParams& params);
Matrix cascade_hamiltonian(double gamma);  // i gamma/2 (s1+ s2- - s1- s2+)

// --- triplet-singlet decomposition ------------------------------------------

struct TripletSingletDecomposition {
    double p00 = 0, pT = 0, pS = 0, p11 = 0;
    Complex chi_ST{};  // <S|rho|T>
    Complex chi_0S{};  // <00|rho|S>
    Complex chi_0T{};  // <00|rho|T>
};

// Populations and coherences of a valid 4x4 density matrix in the
// {|00>, |T>, |S>, |11>} basis. Throws on non-Hermitian or non-unit-trace input.
TripletSingletDecomposition triplet_singlet_transform(const Matrix& rho_q);

// Unitary change of basis: computational -> {|00>, |T>, |S>, |11>} (4x4).
Matrix triplet_singlet_basis();

}  // namespace thermalink
