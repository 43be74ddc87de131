#include "thermalink/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseLU>
#ifdef THERMALINK_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>

namespace thermalink {

namespace {

// Bordered system: rows of L with row `row` replaced by the trace functional.
SparseMatrix bordered_system(const Superoperator& l, int row) {
    const int d = l.dim;
    const long n = static_cast<long>(d) * d;
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(l.mat.nonZeros() + d);
    for (int k = 0; k < l.mat.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(l.mat, k); it; ++it)
            if (it.row() != row) trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < d; ++i) trips.emplace_back(row, i * d + i, Complex(1.0));
    SparseMatrix m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

// vec(I)^T is a left null vector of any trace-preserving generator, so the
// trace row can replace any single row; a singular factorization signals a
// degenerate stationary subspace.
Vector solve_bordered_sparse(const Superoperator& l, int row) {
    const long n = static_cast<long>(l.dim) * l.dim;
    SparseMatrix m = bordered_system(l, row);
    Vector rhs = Vector::Zero(n);
    rhs(row) = 1.0;
#ifdef THERMALINK_HAVE_UMFPACK
    Eigen::UmfPackLU<SparseMatrix> lu(m);
#else
    Eigen::SparseLU<SparseMatrix> lu(m);
#endif
    if (lu.info() != Eigen::Success)
        throw DegenerateSteadyStateError(
            "steady_state: singular bordered system (degenerate stationary subspace?)");
    return lu.solve(rhs);
}

Vector solve_bordered_dense(const Superoperator& l) {
    const int d = l.dim;
    const long n = static_cast<long>(d) * d;
    Matrix m(n + 1, n);
    m.topRows(n) = Matrix(l.mat);
    m.row(n).setZero();
    for (int i = 0; i < d; ++i) m(n, i * d + i) = 1.0;
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(1e-10);
    if (qr.rank() < n)
        throw DegenerateSteadyStateError(
            "steady_state: stationary subspace dimension > 1 (rank-deficient system)");
    Vector rhs = Vector::Zero(n + 1);
    rhs(n) = 1.0;
    return qr.solve(rhs);
}

}  // namespace

SteadyStateResult steady_state(const Superoperator& l) {
    const int d = l.dim;
    const long n = static_cast<long>(d) * d;
    Vector x = (n <= 1024) ? solve_bordered_dense(l) : solve_bordered_sparse(l, 0);

    Matrix rho = unvec(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();  // remove round-off skew
    rho /= rho.trace().real();

    const double l_scale = std::max(max_abs(l.mat), 1e-300);
    double residual = (l.mat * vec(rho)).cwiseAbs().maxCoeff() / l_scale;

    if (n > 1024) {
        // A factorization of the bordered system can succeed numerically even
        // when the stationary subspace is degenerate (a conserved sector makes
        // the system singular up to round-off). Detect this by checking state
        // validity and, when suspicious, re-solving with a different bordered
        // row: distinct solutions expose the extra stationary freedom.
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        const bool suspicious = es.eigenvalues().minCoeff() < -1e-8 || residual > 1e-7;
        if (suspicious) {
            Matrix rho2 = unvec(solve_bordered_sparse(l, d + 1), d);
            rho2 = 0.5 * (rho2 + rho2.adjoint()).eval();
            rho2 /= rho2.trace().real();
            if (trace_distance(rho, rho2) > 1e-6)
                throw DegenerateSteadyStateError(
                    "steady_state: stationary subspace dimension > 1 (bordered solves with "
                    "different trace rows disagree)");
            throw std::runtime_error("steady_state: solution failed the validity check");
        }
    }

    SteadyStateResult out;
    out.residual = residual;
    out.rho = rho;
    if (d % 4 == 0 && d > 4) {
        out.fock_cutoff = d / 4;
        out.rho_qubits = partial_trace_cavity(rho, d / 4);
    } else {
        out.rho_qubits = rho;
    }
    if (out.rho_qubits.rows() == 4) out.concurrence = concurrence(out.rho_qubits);
    return out;
}

SteadyStateResult steady_state_full(const ModelParams& params, const SteadyStateOptions& opts) {
    ModelParams p = params;
    if (p.fock_cutoff == 0)
        p.fock_cutoff =
            std::max(p.default_fock_cutoff(), fock_cutoff_for_tail(p.n_th, opts.tail_tol));
    if (4 * p.fock_cutoff > opts.max_hilbert_dim)
        throw std::runtime_error("steady_state_full: required cutoff " +
                                 std::to_string(p.fock_cutoff) + " exceeds max Hilbert dim");
    SteadyStateResult res = steady_state(build_full_liouvillian(p));

    // Post-hoc tail check on the computed state: population of the topmost
    // retained Fock level must be consistent with the requested tail mass.
    double top = 0.0;
    for (int q = 0; q < 4; ++q)
        top += res.rho(q * p.fock_cutoff + (p.fock_cutoff - 1),
                       q * p.fock_cutoff + (p.fock_cutoff - 1))
                   .real();
    if (top > 10.0 * opts.tail_tol)
        throw CutoffTooSmallError("steady_state_full: top Fock level population " +
                                  std::to_string(top) + " exceeds tail tolerance");
    return res;
}

std::vector<Matrix> evolve(const Superoperator& l, const Matrix& rho0,
                           const std::vector<double>& t_grid, double rtol, double atol) {
    check_density_matrix(rho0, 1e-6);
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i + 1] > t_grid[i]))
            throw std::invalid_argument("evolve: t_grid must be strictly increasing");
    if (!t_grid.empty() && t_grid.front() < 0.0)
        throw std::invalid_argument("evolve: t_grid must be nonnegative");

    // Dormand-Prince 5(4) coefficients (autonomous right-hand side).
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto rhs = [&](const Vector& y) -> Vector { return l.mat * y; };

    Vector y = vec(rho0);
    double t = 0.0;
    const double l_norm = std::max(max_abs(l.mat), 1e-300);
    double h = 0.01 / l_norm;

    std::vector<Matrix> out;
    out.reserve(t_grid.size());

    Vector k1 = rhs(y);
    for (double t_target : t_grid) {
        while (t < t_target) {
            bool step_to_target = false;
            double hs = h;
            if (t + hs >= t_target) {
                hs = t_target - t;
                step_to_target = true;
            }
            const Vector k2 = rhs(y + hs * (a21 * k1));
            const Vector k3 = rhs(y + hs * (a31 * k1 + a32 * k2));
            const Vector k4 = rhs(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vector k5 = rhs(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vector k6 = rhs(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vector y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vector k7 = rhs(y5);
            const Vector err_v =
                hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double err = 0.0;
            for (long i = 0; i < y.size(); ++i) {
                const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
                err = std::max(err, std::abs(err_v(i)) / sc);
            }
            if (err <= 1.0) {
                t += hs;
                y = y5;
                k1 = k7;  // FSAL
            }
            double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            factor = std::clamp(factor, 0.2, 5.0);
            const double h_new = hs * factor;
            if (h_new < 1e-14 * std::max(1.0, std::abs(t_target)))
                throw std::runtime_error("evolve: step size underflow");
            if (!step_to_target || err > 1.0) h = h_new;
        }
        out.push_back(unvec(y, static_cast<int>(rho0.rows())));
    }
    return out;
}

Matrix partial_trace_cavity(const Matrix& rho_full, int n_max) {
    if (rho_full.rows() != 4 * n_max || rho_full.cols() != 4 * n_max)
        throw std::invalid_argument("partial_trace_cavity: dimension mismatch");
    Matrix rho_q = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            rho_q(i, j) = rho_full.block(i * n_max, j * n_max, n_max, n_max).trace();
    return rho_q;
}

void check_density_matrix(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("state must be square");
    if (!is_hermitian(rho, tol)) throw std::invalid_argument("state must be Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > tol)
        throw std::invalid_argument("state must have unit trace");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("state has negative eigenvalues beyond tolerance");
}

double concurrence(const Matrix& rho_q) {
    if (rho_q.rows() != 4 || rho_q.cols() != 4)
        throw std::invalid_argument("concurrence: expected a 4x4 state");
    check_density_matrix(rho_q, 1e-8);

    // Clip the tolerated round-off negativity before forming rho rho~.
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_q);
    Vector evals = es.eigenvalues().cast<Complex>();
    for (int i = 0; i < 4; ++i) evals(i) = std::max(evals(i).real(), 0.0);
    Matrix rho = es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();
    rho /= rho.trace().real();

    Matrix yy = Matrix::Zero(4, 4);  // sigma_y (x) sigma_y
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;

    const Matrix m = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Matrix> ces(m, false);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, ces.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double concurrence_x_diagonal(double p00, double pT, double pS, double p11) {
    return std::max(0.0, pS - pT - 2.0 * std::sqrt(std::max(0.0, p00 * p11)));
}

}  // namespace thermalink
