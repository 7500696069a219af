#include "dar/numerics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "dar/error.hpp"

namespace dar {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
    if (!m.allFinite()) {
        throw NumericalError(std::string(what) + ": input contains non-finite entries");
    }
}

SvdResult svd(const Eigen::Ref<const Matrix>& m) {
    require_finite(m, "svd");
    Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vector singular_values(const Eigen::Ref<const Matrix>& m) {
    require_finite(m, "singular_values");
    Eigen::BDCSVD<Matrix> solver(m);
    return solver.singularValues();
}

double spectral_norm(const Eigen::Ref<const Matrix>& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return singular_values(m)(0);
}

EigenDecomposition sym_eig(const Eigen::Ref<const Matrix>& m) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("sym_eig: matrix is not square");
    }
    require_finite(m, "sym_eig");
    const double norm = m.norm();
    const double asym = (m - m.transpose()).norm();
    if (asym > tol::kSymmetry * norm) {
        std::ostringstream msg;
        msg << "sym_eig: asymmetry " << asym << " exceeds tolerance " << tol::kSymmetry * norm;
        throw NumericalError(msg.str());
    }
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("sym_eig: eigensolver did not converge");
    }
    // Eigen returns ascending order.
    const Eigen::Index n = sym.rows();
    EigenDecomposition out{Vector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Matrix solve_spd(const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Matrix>& rhs) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n || rhs.rows() != n) {
        throw InvalidArgument("solve_spd: dimension mismatch");
    }
    require_finite(m, "solve_spd");
    require_finite(rhs, "solve_spd");

    // Row-oriented Cholesky so the failing pivot can be named.
    Matrix L = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = m(j, j) - L.row(j).head(j).squaredNorm();
        if (!(d > 0.0)) {
            std::ostringstream msg;
            msg << "solve_spd: matrix is not positive definite (pivot " << j << " = " << d << ")";
            throw NumericalError(msg.str());
        }
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        const Eigen::Index rest = n - j - 1;
        if (rest > 0) {
            L.col(j).tail(rest) =
                (m.col(j).tail(rest) - L.bottomLeftCorner(rest, j) * L.row(j).head(j).transpose()) / ljj;
        }
    }
    Matrix x = L.triangularView<Eigen::Lower>().solve(rhs);
    L.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

Matrix polar_factor(const Eigen::Ref<const Matrix>& m) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("polar_factor: matrix is not square");
    }
    const SvdResult f = svd(m);
    const Eigen::Index n = m.rows();
    if (n > 0 && !(f.S(n - 1) > tol::kPolarRank)) {
        std::ostringstream msg;
        msg << "polar_factor: matrix is rank deficient (smallest singular value " << f.S(n - 1)
            << "), polar factor is not unique";
        throw NumericalError(msg.str());
    }
    return f.U * f.V.transpose();
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            g(i, j) = rng.normal();
        }
    }
    return g;
}

Matrix haar_orthogonal(Eigen::Index n, RngStream& rng) {
    if (n < 1) {
        throw InvalidArgument("haar_orthogonal: dimension must be at least 1");
    }
    const Matrix g = gaussian_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    return q;
}

double orthogonality_defect(const Eigen::Ref<const Matrix>& q) {
    return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

Matrix orthogonal_complement(const Eigen::Ref<const Matrix>& U) {
    const Eigen::Index n = U.rows();
    const Eigen::Index d = U.cols();
    Eigen::HouseholderQR<Matrix> qr(U);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    return q.rightCols(n - d);
}

}  // namespace dar
