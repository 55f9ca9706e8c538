#pragma once

// The spectral presheaf on a finite context poset. Gel'fand spectra are
// finite: each point of Σ_V is one minimal projection of V, so points are
// indices and clopen subsets are index sets.

#include <string>
#include <vector>

#include "toposq/context.hpp"

namespace toposq {

struct SpectralElement {
    std::string context_id;
    int minimal_index = 0;

    friend bool operator==(const SpectralElement&, const SpectralElement&) = default;
};

struct ClopenSubset {
    std::string context_id;
    std::vector<int> members;  ///< sorted ascending

    friend bool operator==(const ClopenSubset&, const ClopenSubset&) = default;
};

Mask to_mask(const std::vector<int>& members);
std::vector<int> to_members(Mask mask);

/// Gel'fand transform Ā(λ) = tr(p·A)/rank(p). Throws NotInContext unless A lies in ctx.
double evaluate(const SpectralElement& lambda, const HermitianMatrix& a, const Context& ctx,
                const Tolerances& tol = {});

/// α(P) = {λ : λ(P) = 1}. Throws NotInContext unless P lies in ctx.
ClopenSubset alpha(const Projection& p, const Context& ctx, const Tolerances& tol = {});

/// Sum of the member minimal projections.
Projection alpha_inverse(const ClopenSubset& s, const Context& ctx);

/// λ ↦ λ|_{to}; requires to ⊆ from.
SpectralElement restrict(const SpectralElement& lambda, const Context& from, const Context& to,
                         const Tolerances& tol = {});

}  // namespace toposq
