#pragma once

// Random generators and independent oracles shared by the test binaries.
// Oracles use plain Eigen arithmetic and brute force; they never call the
// library routine they check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "toposq/quantum_logic.hpp"
#include "toposq/reconstruct.hpp"

namespace support {

using namespace toposq;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t index(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline Matrix gaussian_matrix(int n, Rng& rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = Complex(g(rng), g(rng));
    return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline Matrix random_unitary(int n, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, rng));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (int k = 0; k < n; ++k) q.col(k) *= r(k, k) / std::abs(r(k, k));
    return q;
}

inline Vector random_unit_vector(int n, Rng& rng) {
    std::normal_distribution<double> g;
    Vector v(n);
    for (int k = 0; k < n; ++k) v(k) = Complex(g(rng), g(rng));
    return v.normalized();
}

/// Full-rank or rank-deficient (rank ≥ 1) density matrix.
inline DensityState random_state(int n, Rng& rng) {
    const int rank = 1 + static_cast<int>(index(rng, static_cast<std::size_t>(n)));
    const Matrix g = gaussian_matrix(n, rng).leftCols(rank);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (rho + rho.adjoint()) / 2.0;
    return DensityState::from_matrix(rho);
}

/// Hermitian matrix with eigenvalues drawn from a small integer set, so that
/// degenerate spectra occur regularly.
inline HermitianMatrix random_observable(int n, Rng& rng, const Matrix& basis) {
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (auto& e : eig) e = static_cast<double>(static_cast<int>(index(rng, 5)) - 2) + (uniform(rng) < 0.5 ? 0.5 : 0.0);
    Matrix d = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) d(k, k) = eig[static_cast<std::size_t>(k)];
    Matrix a = basis * d * basis.adjoint();
    return HermitianMatrix::from((a + a.adjoint()) / 2.0);
}

/// Context whose minimals group the columns of `basis` by `block`.
inline Context coarsened_context(const Matrix& basis, const std::vector<int>& block) {
    const int n = static_cast<int>(basis.rows());
    const int blocks = *std::max_element(block.begin(), block.end()) + 1;
    std::vector<Projection> minimals;
    for (int b = 0; b < blocks; ++b) {
        Matrix cols(n, 0);
        for (int k = 0; k < n; ++k)
            if (block[static_cast<std::size_t>(k)] == b) {
                cols.conservativeResize(n, cols.cols() + 1);
                cols.col(cols.cols() - 1) = basis.col(k);
            }
        minimals.push_back(Projection::from_orthonormal_basis(cols, n));
    }
    return Context::from_minimals(std::move(minimals));
}

/// Random partition of {0..n-1} into at least two blocks.
inline std::vector<int> random_partition(int n, Rng& rng) {
    std::vector<int> block(static_cast<std::size_t>(n));
    do {
        const int blocks = 2 + static_cast<int>(index(rng, static_cast<std::size_t>(n - 1)));
        for (auto& b : block) b = static_cast<int>(index(rng, static_cast<std::size_t>(blocks)));
        // relabel densely
        std::vector<int> map(static_cast<std::size_t>(blocks), -1);
        int next = 0;
        for (auto& b : block) {
            if (map[static_cast<std::size_t>(b)] < 0) map[static_cast<std::size_t>(b)] = next++;
            b = map[static_cast<std::size_t>(b)];
        }
    } while (*std::max_element(block.begin(), block.end()) == 0);
    return block;
}

/// Random poset with roughly `target` contexts: random bases (some sharing a
/// vector with an earlier basis) and random coarsenings, closed under
/// intersection.
inline PosetPtr random_poset(int n, std::size_t target, Rng& rng, std::vector<Matrix>* bases_out = nullptr) {
    std::vector<Context> seeds;
    std::vector<Matrix> bases;
    Caps caps;
    caps.max_contexts = 4 * target + 64;
    while (seeds.size() < target) {
        Matrix basis;
        if (!bases.empty() && uniform(rng) < 0.5) {
            // rotate all but one vector of an earlier basis
            basis = bases[index(rng, bases.size())];
            const int keep = static_cast<int>(index(rng, static_cast<std::size_t>(n)));
            std::vector<int> rest;
            for (int k = 0; k < n; ++k)
                if (k != keep) rest.push_back(k);
            Matrix sub(n, n - 1);
            for (int k = 0; k < n - 1; ++k) sub.col(k) = basis.col(rest[static_cast<std::size_t>(k)]);
            sub = sub * random_unitary(n - 1, rng);
            for (int k = 0; k < n - 1; ++k) basis.col(rest[static_cast<std::size_t>(k)]) = sub.col(k);
        } else {
            basis = random_unitary(n, rng);
        }
        bases.push_back(basis);
        seeds.push_back(coarsened_context(basis, [&] {
            std::vector<int> fine(static_cast<std::size_t>(n));
            std::iota(fine.begin(), fine.end(), 0);
            return fine;
        }()));
        const std::size_t coarsenings = n > 2 ? index(rng, 4) : 0;
        for (std::size_t c = 0; c < coarsenings && seeds.size() < target; ++c)
            seeds.push_back(coarsened_context(basis, random_partition(n, rng)));
    }
    if (bases_out) *bases_out = bases;
    return build_poset_from_contexts(std::move(seeds), true, {}, caps);
}

/// Antitone subobject from random masks, closed by pushing every fine
/// component down each arrow until nothing changes.
inline ClopenSubobject random_subobject(const PosetPtr& poset, Rng& rng, double density = 0.3) {
    std::vector<Mask> masks(poset->size(), 0);
    for (std::size_t v = 0; v < poset->size(); ++v)
        for (int i = 0; i < poset->context(v).size(); ++i)
            if (uniform(rng) < density) masks[v] |= Mask{1} << i;
    const auto arrows = poset->arrows(false);
    for (bool changed = true; changed;) {
        changed = false;
        for (auto [coarse, fine] : arrows) {
            const auto& r = poset->restriction(fine, coarse);
            Mask pushed = 0;
            for (int i = 0; i < poset->context(fine).size(); ++i)
                if (masks[fine] & (Mask{1} << i)) pushed |= Mask{1} << r[static_cast<std::size_t>(i)];
            if ((masks[coarse] | pushed) != masks[coarse]) {
                masks[coarse] |= pushed;
                changed = true;
            }
        }
    }
    return ClopenSubobject::from_masks(poset, std::move(masks));
}

// ---------------------------------------------------------------- oracles

/// Smallest sum of minimals Q of the context with QP = P, by brute force over
/// all subsets.
inline Matrix outer_daseinisation_oracle(const Matrix& p, const Context& ctx) {
    const int k = ctx.size();
    const int n = static_cast<int>(p.rows());
    Matrix best = Matrix::Identity(n, n);
    double best_trace = n + 1.0;
    for (unsigned subset = 0; subset < (1u << k); ++subset) {
        Matrix q = Matrix::Zero(n, n);
        for (int i = 0; i < k; ++i)
            if (subset & (1u << i)) q += ctx.minimal(i).matrix();
        if ((q * p - p).norm() > 1e-8) continue;
        const double t = q.trace().real();
        if (t < best_trace) {
            best_trace = t;
            best = q;
        }
    }
    return best;
}

/// Orthogonal projection onto range(P) ∩ range(Q) from the null space of
/// [1−P; 1−Q].
inline Matrix meet_oracle(const Matrix& p, const Matrix& q) {
    const int n = static_cast<int>(p.rows());
    Matrix stacked(2 * n, n);
    stacked << Matrix::Identity(n, n) - p, Matrix::Identity(n, n) - q;
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    Matrix result = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        if (svd.singularValues()(k) < 1e-7) result += svd.matrixV().col(k) * svd.matrixV().col(k).adjoint();
    return result;
}

inline Matrix projection_matrix(const Vector& v) { return v * v.adjoint() / v.squaredNorm(); }

inline Vector basis_vector(int n, int k) {
    Vector v = Vector::Zero(n);
    v(k) = 1.0;
    return v;
}

/// Frame poset of the given dimension (frame bases, closed).
inline PosetPtr frame_poset(int n) { return build_poset(frame_generator_sets(n), true); }

}  // namespace support
