#pragma once

// Pseudo-states, expectation values recovered from measures, and the search
// for global sections (points) of the spectral presheaf.

#include <cstddef>
#include <optional>
#include <vector>

#include "toposq/measure.hpp"

namespace toposq {

struct PseudoState {
    Vector psi;
    ClopenSubobject subobject;                ///< δ(P^ψ)
    ClopenSubobject subobject_by_expectation; ///< ⋀{Q ∈ P(V) : ⟨ψ,Qψ⟩ = 1} per context
    bool formulas_agree = false;
};

/// Throws NotUnitVector unless |‖ψ‖ − 1| ≤ tol.state.
PseudoState pseudo_state(const Vector& psi, PosetPtr poset, const Tolerances& tol = {});

struct MinimalityReport {
    std::size_t strictly_smaller = 0;   ///< pool members strictly below w_ψ
    std::vector<std::size_t> violators; ///< those of measure 1 everywhere
    bool passed = false;
};

/// No pool member strictly below the pseudo-state has μ_ψ-measure 1 at every
/// context.
MinimalityReport check_minimality(const PseudoState& ps, const std::vector<ClopenSubobject>& pool,
                                  const Tolerances& tol = {});

/// Same check against every subobject of the poset (when at most `cap` exist).
MinimalityReport check_minimality_exhaustive(const PseudoState& ps, std::size_t cap, const Tolerances& tol = {});

struct ExpectationTerm {
    double eigenvalue = 0;
    double minimum = 0;             ///< min_V μ(δ(P_i))(V)
    std::size_t argmin = 0;         ///< a context attaining the minimum
    std::optional<double> at_va;    ///< μ(δ(P_i))(V_A) when V_A is in the poset
};

struct ExpectationResult {
    double value = 0;
    double coefficient_sum = 0;          ///< Σ|a_i|
    std::optional<std::size_t> va_context;
    bool va_trivial = false;             ///< A is a multiple of the identity
    bool degraded = false;               ///< V_A missing: the minima may not be attained
    bool minimum_attained_at_va = false;
    std::vector<ExpectationTerm> terms;
};

/// E(A; μ) = Σ a_i · min_V μ(δ(P_i))(V) over the grouped spectral
/// decomposition A = Σ a_i P_i.
ExpectationResult expectation_via_measure(const HermitianMatrix& a, const Measure& mu, const Tolerances& tol = {});

struct TruncatedOperator {
    HermitianMatrix approximation;
    double norm_gap;  ///< ‖B − B_j‖ (operator norm)
};

/// Keeps the `terms` eigenvalues of largest magnitude of the spectral sum.
TruncatedOperator truncate_spectral_sum(const HermitianMatrix& b, std::size_t terms, const Tolerances& tol = {});

struct GlobalSectionCandidate {
    std::vector<int> choice;  ///< minimal index per context, poset order
};

/// Compatibility along every arrow of the poset.
bool is_global_section(const ContextPoset& poset, const GlobalSectionCandidate& candidate);

struct SearchResult {
    std::optional<GlobalSectionCandidate> section;
    std::size_t nodes = 0;
    std::size_t max_depth = 0;
};

/// Backtracking over contexts (most minimals first, ties by id). A partial
/// assignment is pruned when it breaks an arrow, or when two contexts that
/// share a projection disagree about whether their chosen minimal lies under
/// it. Throws SearchBudgetExceeded after `node_cap` nodes.
SearchResult global_section_search(const ContextPoset& poset, std::size_t node_cap);

}  // namespace toposq
