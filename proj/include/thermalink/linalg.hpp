#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>

namespace thermalink {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr Complex I_UNIT{0.0, 1.0};

Matrix kron(const Matrix& a, const Matrix& b);
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

// Column-stacking vectorization: vec(rho) stacks the columns of rho, so that
// vec(A rho B) = (B^T (x) A) vec(rho). Every superoperator in this project
// uses this one convention.
Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, int dim);

Matrix dagger(const Matrix& a);

double max_abs(const Matrix& a);
double max_abs(const SparseMatrix& a);

bool is_hermitian(const Matrix& a, double tol = 1e-10);

// (1/2) ||a - b||_1 for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

SparseMatrix sparse_identity(int n);
SparseMatrix to_sparse(const Matrix& a, double drop_tol = 0.0);

}  // namespace thermalink
