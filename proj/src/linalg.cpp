#include "thermalink/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace thermalink {

Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out;
    out = Eigen::kroneckerProduct(a, b);
    out.makeCompressed();
    return out;
}

Vector vec(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvec(const Vector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix dagger(const Matrix& a) { return a.adjoint(); }

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

double max_abs(const SparseMatrix& a) {
    double m = 0.0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

bool is_hermitian(const Matrix& a, double tol) {
    return a.rows() == a.cols() && max_abs(Matrix(a - a.adjoint())) <= tol;
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

SparseMatrix sparse_identity(int n) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

SparseMatrix to_sparse(const Matrix& a, double drop_tol) {
    SparseMatrix out = a.sparseView(1.0, drop_tol);
    out.makeCompressed();
    return out;
}

}  // namespace thermalink
