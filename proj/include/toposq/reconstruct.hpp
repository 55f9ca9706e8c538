#pragma once

// From an abstract measure on clopen subobjects back to a density state:
// read off m(P) = μ(δ(P))(V) at contexts containing P, check that the value
// does not depend on the witness, then invert tr(ρP) = m(P) on a
// tomographically complete pool of projections.

#include <string>
#include <vector>

#include "toposq/measure.hpp"

namespace toposq {

struct ProjectionMeasure {
    int dim = 0;
    std::vector<std::pair<Projection, double>> entries;
};

struct ExtractedValue {
    double value = 0;                   ///< mean over containing contexts
    double spread = 0;                  ///< max − min over containing contexts
    std::vector<std::size_t> contexts;  ///< contexts containing P
    std::vector<double> values;         ///< μ(δ(P))(V) for each of them
};

/// Full detail of m(P). Throws NoContainingContext; never throws on spread.
ExtractedValue extract_m_detailed(const Measure& mu, const Projection& p, const ContextPoset& poset);

/// m(P). Throws NoContainingContext, or WellDefinednessViolation when the
/// containing contexts disagree by more than tol.order.
double extract_m(const Measure& mu, const Projection& p, const ContextPoset& poset, const Tolerances& tol = {});

struct Witness {
    std::size_t pool_index;
    std::size_t context;
    double value;
};

struct WellDefinednessReport {
    std::vector<Witness> witnesses;
    double spread = 0;
    bool passed = false;
};

/// Collects μ(S)(V) over every pool member S and context V with α⁻¹(S_V) = P.
/// Throws EmptyWitnessSet if no pair qualifies.
WellDefinednessReport verify_well_definedness(const Measure& mu, const Projection& p,
                                              const std::vector<ClopenSubobject>& pool, const ContextPoset& poset,
                                              const Tolerances& tol = {});

/// Rank-1 frame: e_k, (e_j + e_k)/√2 and (e_j + i·e_k)/√2 for j < k; dim²
/// projections spanning the Hermitian matrices.
std::vector<Projection> default_frame(int dim);

/// Generator sets whose contexts contain every frame projection in several
/// ways: the diagonal context, {P, 1 − P} for each frame projection, and the
/// bases {e_k, (e_j ± e_l)/√2} and {e_k, (e_j ± i·e_l)/√2}.
std::vector<std::vector<HermitianMatrix>> frame_generator_sets(int dim);

/// Real coordinates of a Hermitian matrix in an orthonormal basis for the
/// Hilbert–Schmidt inner product (length dim²).
Eigen::VectorXd hermitian_coordinates(const Matrix& h);
Matrix from_hermitian_coordinates(const Eigen::VectorXd& x, int dim);

/// Rank of the real span of the pool inside the Hermitian matrices.
int pool_rank(const std::vector<Projection>& pool);

struct ReconstructionReport {
    DensityState state;
    double residual_before_projection = 0;  ///< least-squares solution, before PSD clipping
    double residual = 0;                    ///< max_k |tr(ρP_k) − m(P_k)| after clipping
    int pool_rank = 0;
    std::vector<double> m_values;
    std::vector<std::string> warnings;
};

/// Constrained least squares for ρ Hermitian with trace 1, followed by PSD
/// projection. Throws PoolRankDeficient or InfeasibleMeasure (residual above
/// 100·tol.order); dim 2 attaches a TypeI2Warning.
ReconstructionReport reconstruct_state(const Measure& mu, const std::vector<Projection>& pool,
                                       const ContextPoset& poset, const Tolerances& tol = {});

}  // namespace toposq
