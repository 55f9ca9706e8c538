#pragma once

// Dense complex Hermitian linear algebra: the projection lattice of M_n(C),
// spectral decompositions and density states. Everything downstream compares
// matrices through the predicates here, so all tolerance policy lives in
// Tolerances.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "toposq/errors.hpp"

namespace toposq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Tolerances {
    double herm = 1e-9;       ///< Hermiticity check
    double idem = 1e-9;       ///< idempotency, order and membership checks
    double state = 1e-9;      ///< trace / positivity of density states
    double eig_group = 1e-8;  ///< eigenvalues closer than this are merged
    double order = 1e-9;      ///< residuals of measure identities

    /// Throws BadTolerances unless all fields are positive and eig_group > idem.
    void validate() const;
};

struct Caps {
    int max_dim = 16;
    std::size_t max_contexts = 512;
    std::size_t search_nodes = 1'000'000;
};

class HermitianMatrix {
public:
    /// Checks ‖A − A†‖_max ≤ tol.herm; stores the symmetrized (A + A†)/2.
    static HermitianMatrix from(const Matrix& a, const Tolerances& tol = {});
    static HermitianMatrix identity(int dim);
    static HermitianMatrix diagonal(const std::vector<double>& entries);

    const Matrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

/// Orthogonal projection. The matrix is always spectrally rounded
/// (eigenvalues snapped to {0,1}) at construction. The complement is cached
/// so that complement().complement() hands back the identical matrix.
class Projection {
public:
    /// Validates Hermiticity and idempotency (tol.idem) before rounding.
    static Projection from_matrix(const Matrix& m, const Tolerances& tol = {});
    /// Spectral rounding of an (approximately) Hermitian matrix with
    /// eigenvalues near {0,1}; no validation. For internal constructions.
    static Projection rounded(const Matrix& m);
    /// Projection onto the column span of an orthonormal basis.
    static Projection from_orthonormal_basis(const Matrix& basis, int dim);
    /// Rank-1 projection onto the ray of a (not necessarily normalized) vector.
    static Projection onto(const Vector& v);
    static Projection zero(int dim);
    static Projection identity(int dim);

    const Matrix& matrix() const { return *m_; }
    int dim() const { return static_cast<int>(m_->rows()); }
    int rank() const { return rank_; }

    Projection complement() const;

    /// Orthonormal basis of the range (dim × rank).
    Matrix range_basis() const;

private:
    Projection(std::shared_ptr<const Matrix> m, int rank)
        : m_(std::move(m)), rank_(rank) {}

    std::shared_ptr<const Matrix> m_;
    std::shared_ptr<const Matrix> complement_;
    int rank_ = 0;
};

class DensityState {
public:
    /// Trace 1 within tol.state and eigenvalues ≥ −tol.state.
    static DensityState from_matrix(const Matrix& m, const Tolerances& tol = {});
    /// Pure state |ψ⟩⟨ψ|; throws NotUnitVector if |‖ψ‖ − 1| > tol.state.
    static DensityState pure(const Vector& psi, const Tolerances& tol = {});
    static DensityState maximally_mixed(int dim);

    const Matrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }

    /// Re trace(ρ·A).
    double expectation(const Matrix& a) const;

private:
    explicit DensityState(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

struct Eigenpair {
    double value;
    Projection projection;
};

/// Eigenvalues ascending, degenerate ones (gap ≤ tol.eig_group) merged into a
/// single eigenprojection.
std::vector<Eigenpair> spectral_decompose(const HermitianMatrix& a, const Tolerances& tol = {});

/// range(p) ⊆ range(q), i.e. ‖P − Q·P‖_F ≤ tol.idem.
bool proj_leq(const Projection& p, const Projection& q, const Tolerances& tol = {});

/// ‖P − Q‖_F ≤ 2·tol.idem.
bool proj_equal(const Projection& p, const Projection& q, const Tolerances& tol = {});

/// Projection onto range(p) ∩ range(q). Works for non-commuting pairs.
Projection proj_meet(const Projection& p, const Projection& q, const Tolerances& tol = {});

/// Projection onto range(p) + range(q).
Projection proj_join(const Projection& p, const Projection& q, const Tolerances& tol = {});

struct LatticeOps {
    Projection meet;
    Projection join;
    Projection complement_of_p;
};

LatticeOps proj_lattice_ops(const Projection& p, const Projection& q, const Tolerances& tol = {});

/// ‖AB − BA‖_F ≤ tol.
bool commute(const Matrix& a, const Matrix& b, double tol);

double frobenius_distance(const Matrix& a, const Matrix& b);

void require_same_dim(int a, int b, const char* where);

}  // namespace toposq
