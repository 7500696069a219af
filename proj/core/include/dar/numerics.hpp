#pragma once

#include <Eigen/Dense>

#include "dar/rng.hpp"

namespace dar {

/// Dense 64-bit matrices are column-major Eigen matrices throughout.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
// Fixed tolerances shared by the kernels and the checks built on them.
inline constexpr double kSymmetry = 1e-8;
inline constexpr double kPolarRank = 1e-12;
}  // namespace tol

struct SvdResult {
    Matrix U;
    Vector S;  // descending, non-negative
    Matrix V;
};

struct EigenDecomposition {
    Vector values;   // descending
    Matrix vectors;  // orthonormal columns, same order as values
};

/// Throws NumericalError naming `what` when m contains NaN or Inf.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

/// Thin SVD, m = U diag(S) V^T.
SvdResult svd(const Eigen::Ref<const Matrix>& m);

/// Singular values only, descending.
Vector singular_values(const Eigen::Ref<const Matrix>& m);

/// Largest singular value (spectral norm).
double spectral_norm(const Eigen::Ref<const Matrix>& m);

/// Eigendecomposition of a symmetric matrix. The input is symmetrised as
/// (m + m^T)/2 before decomposing; asymmetry beyond 1e-8 relative is an error.
EigenDecomposition sym_eig(const Eigen::Ref<const Matrix>& m);

/// Solves m x = rhs for symmetric positive-definite m by Cholesky.
/// Loss of positive definiteness reports the failing pivot.
Matrix solve_spd(const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Matrix>& rhs);

/// Orthogonal polar factor U_s V_s^T of a square full-rank matrix: the
/// Frobenius-closest orthogonal matrix.
Matrix polar_factor(const Eigen::Ref<const Matrix>& m);

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the columns of Q sign-corrected so that diag(R) > 0.
Matrix haar_orthogonal(Eigen::Index n, RngStream& rng);

/// Matrix of i.i.d. standard normals, filled column by column.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

/// ||Q^T Q - I||_F.
double orthogonality_defect(const Eigen::Ref<const Matrix>& q);

/// Orthonormal basis of the orthogonal complement of span(U), U with orthonormal columns.
Matrix orthogonal_complement(const Eigen::Ref<const Matrix>& U);

}  // namespace dar
