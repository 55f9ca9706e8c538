#include "toposq/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace toposq {

namespace {

Matrix symmetrized(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

Matrix outer_of_basis(const Matrix& basis, int dim) {
    if (basis.cols() == 0) return Matrix::Zero(dim, dim);
    return symmetrized(basis * basis.adjoint());
}

}  // namespace

void Tolerances::validate() const {
    if (!(herm > 0 && idem > 0 && state > 0 && eig_group > 0 && order > 0))
        throw Error(ErrorKind::BadTolerances, "all tolerances must be strictly positive");
    if (!(eig_group > idem))
        throw Error(ErrorKind::BadTolerances, "tol_eig_group must exceed tol_idem");
}

void require_same_dim(int a, int b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": " << a << " vs " << b;
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
}

HermitianMatrix HermitianMatrix::from(const Matrix& a, const Tolerances& tol) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, "matrix must be square and non-empty");
    const double defect = hermiticity_defect(a);
    if (defect > tol.herm) {
        std::ostringstream os;
        os << "max |A - A^dagger| = " << defect;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
    return HermitianMatrix(symmetrized(a));
}

HermitianMatrix HermitianMatrix::identity(int dim) { return HermitianMatrix(Matrix::Identity(dim, dim)); }

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& entries) {
    const int n = static_cast<int>(entries.size());
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
    return HermitianMatrix(std::move(m));
}

Projection Projection::rounded(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
    Matrix basis(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        basis.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
    return from_orthonormal_basis(basis, n);
}

Projection Projection::from_matrix(const Matrix& m, const Tolerances& tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, "projection must be square and non-empty");
    if (hermiticity_defect(m) > tol.herm) throw Error(ErrorKind::NotHermitian, "projection is not Hermitian");
    const double idem = (m * m - m).norm();
    if (idem > tol.idem) {
        std::ostringstream os;
        os << "|P^2 - P|_F = " << idem;
        throw Error(ErrorKind::NotProjection, os.str());
    }
    const double tr = m.trace().real();
    if (std::abs(tr - std::round(tr)) > tol.idem * std::max<double>(1.0, static_cast<double>(m.rows())))
        throw Error(ErrorKind::NotProjection, "trace is not an integer");
    return rounded(m);
}

Projection Projection::from_orthonormal_basis(const Matrix& basis, int dim) {
    auto m = std::make_shared<const Matrix>(outer_of_basis(basis, dim));
    auto c = std::make_shared<const Matrix>(Matrix(Matrix::Identity(dim, dim)) - *m);
    Projection p(std::move(m), static_cast<int>(basis.cols()));
    p.complement_ = std::move(c);
    return p;
}

Projection Projection::onto(const Vector& v) {
    const double norm = v.norm();
    if (norm == 0.0) throw Error(ErrorKind::NotUnitVector, "cannot project onto the zero vector");
    Matrix basis = v / norm;
    return from_orthonormal_basis(basis, static_cast<int>(v.size()));
}

Projection Projection::zero(int dim) { return from_orthonormal_basis(Matrix(dim, 0), dim); }

Projection Projection::identity(int dim) {
    return from_orthonormal_basis(Matrix(Matrix::Identity(dim, dim)), dim);
}

Projection Projection::complement() const {
    Projection c(complement_, dim() - rank_);
    c.complement_ = m_;
    return c;
}

Matrix Projection::range_basis() const {
    const int n = dim();
    if (rank_ == 0) return Matrix(n, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(*m_);
    // eigenvalues ascending: the rank-many 1s are at the end
    return es.eigenvectors().rightCols(rank_);
}

DensityState DensityState::from_matrix(const Matrix& m, const Tolerances& tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, "density matrix must be square and non-empty");
    if (hermiticity_defect(m) > tol.herm) throw Error(ErrorKind::NotHermitian, "density matrix is not Hermitian");
    Matrix h = symmetrized(m);
    const double tr = h.trace().real();
    if (std::abs(tr - 1.0) > tol.state) {
        std::ostringstream os;
        os << "trace = " << tr;
        throw Error(ErrorKind::NotState, os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.state) {
        std::ostringstream os;
        os << "negative eigenvalue " << es.eigenvalues().minCoeff();
        throw Error(ErrorKind::NotState, os.str());
    }
    return DensityState(std::move(h));
}

DensityState DensityState::pure(const Vector& psi, const Tolerances& tol) {
    if (psi.size() == 0) throw Error(ErrorKind::NotUnitVector, "empty vector");
    if (std::abs(psi.norm() - 1.0) > tol.state) throw Error(ErrorKind::NotUnitVector, "vector norm differs from 1");
    return DensityState(Projection::onto(psi).matrix());
}

DensityState DensityState::maximally_mixed(int dim) {
    return DensityState(Matrix(Matrix::Identity(dim, dim)) / static_cast<double>(dim));
}

double DensityState::expectation(const Matrix& a) const {
    require_same_dim(dim(), static_cast<int>(a.rows()), "DensityState::expectation");
    return (m_ * a).trace().real();
}

std::vector<Eigenpair> spectral_decompose(const HermitianMatrix& a, const Tolerances& tol) {
    const int n = a.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    const auto& values = es.eigenvalues();
    const auto& vectors = es.eigenvectors();

    std::vector<Eigenpair> out;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i < n && values(i) - values(i - 1) <= tol.eig_group) continue;
        const int count = i - start;
        const double mean = values.segment(start, count).mean();
        out.push_back({mean, Projection::from_orthonormal_basis(vectors.middleCols(start, count), n)});
        start = i;
    }
    return out;
}

bool proj_leq(const Projection& p, const Projection& q, const Tolerances& tol) {
    require_same_dim(p.dim(), q.dim(), "proj_leq");
    if (p.rank() == 0) return true;
    if (p.rank() > q.rank()) return false;
    return (p.matrix() - q.matrix() * p.matrix()).norm() <= tol.idem;
}

bool proj_equal(const Projection& p, const Projection& q, const Tolerances& tol) {
    require_same_dim(p.dim(), q.dim(), "proj_equal");
    return p.rank() == q.rank() && frobenius_distance(p.matrix(), q.matrix()) <= 2.0 * tol.idem;
}

Projection proj_join(const Projection& p, const Projection& q, const Tolerances& tol) {
    require_same_dim(p.dim(), q.dim(), "proj_join");
    const int n = p.dim();
    if (p.rank() == 0) return q;
    if (q.rank() == 0) return p;
    if (p.rank() == n) return p;
    if (q.rank() == n) return q;

    Matrix stacked(n, p.rank() + q.rank());
    stacked << p.range_basis(), q.range_basis();
    // Singular values of two stacked orthonormal bases scale linearly with the
    // principal angles, so the rank cut is consistent with proj_leq.
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol.idem) ++rank;
    rank = std::min(rank, n);
    return Projection::from_orthonormal_basis(svd.matrixU().leftCols(rank), n);
}

Projection proj_meet(const Projection& p, const Projection& q, const Tolerances& tol) {
    require_same_dim(p.dim(), q.dim(), "proj_meet");
    return proj_join(p.complement(), q.complement(), tol).complement();
}

LatticeOps proj_lattice_ops(const Projection& p, const Projection& q, const Tolerances& tol) {
    return {proj_meet(p, q, tol), proj_join(p, q, tol), p.complement()};
}

bool commute(const Matrix& a, const Matrix& b, double tol) { return (a * b - b * a).norm() <= tol; }

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

}  // namespace toposq
