#pragma once

// Contexts (commutative unital subalgebras of M_n) and the finite poset they
// form under inclusion. A context is stored through its minimal projections;
// a projection lies in the context iff it is a sum of minimals.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "toposq/matrix.hpp"

namespace toposq {

/// Bitmask over a context's minimal projections (index i ↔ bit i).
using Mask = std::uint64_t;

inline constexpr int kMaxMinimals = 64;

class Context {
public:
    /// Validates pairwise orthogonality and completeness, sorts the minimals
    /// canonically and derives the content-hash id. Throws TrivialContext for
    /// fewer than two minimals.
    static Context from_minimals(std::vector<Projection> minimals, const Tolerances& tol = {});

    const std::string& id() const { return id_; }
    int dim() const { return dim_; }
    int size() const { return static_cast<int>(minimals_.size()); }
    const std::vector<Projection>& minimals() const { return minimals_; }
    const Projection& minimal(int i) const { return minimals_.at(static_cast<std::size_t>(i)); }
    Mask full_mask() const;

    /// ‖A − Σ_i (tr(p_i A)/rank p_i)·p_i‖_F ≤ tol.idem·dim.
    bool contains(const Matrix& a, const Tolerances& tol = {}) const;

    /// Members {i : p_i ≤ P} if P lies in the context.
    std::optional<Mask> mask_of(const Projection& p, const Tolerances& tol = {}) const;

    /// Sum of the minimal projections selected by `mask`.
    Projection projection_of(Mask mask) const;

    /// Canonical text the id is hashed from (entries rounded at 1e-6).
    std::string canonical_text() const;

private:
    Context() = default;
    std::string id_;
    int dim_ = 0;
    std::vector<Projection> minimals_;
};

/// Common refinement of the generators' eigenprojections.
Context context_from_generators(const std::vector<HermitianMatrix>& ops, const Tolerances& tol = {});

/// The largest context contained in both, or nullopt when only 0 and 1 are
/// shared.
std::optional<Context> context_intersection(const Context& a, const Context& b, const Tolerances& tol = {});

/// For coarse ⊆ fine: entry i is the index of the unique minimal of `coarse`
/// lying above minimal i of `fine`. nullopt when coarse is not a subcontext.
std::optional<std::vector<int>> restriction_map(const Context& fine, const Context& coarse,
                                                const Tolerances& tol = {});

/// coarse ⊆ fine as algebras.
bool is_subcontext(const Context& coarse, const Context& fine, const Tolerances& tol = {});

class ContextPoset;
using PosetPtr = std::shared_ptr<const ContextPoset>;

class ContextPoset {
public:
    /// Deduplicates (mutual inclusion), computes the order and all restriction
    /// maps, and runs the exhaustive order-axiom checks.
    static PosetPtr from_contexts(std::vector<Context> contexts, const Tolerances& tol = {}, const Caps& caps = {});

    const std::string& id() const { return id_; }
    int dim() const { return dim_; }
    std::size_t size() const { return contexts_.size(); }
    const std::vector<Context>& contexts() const { return contexts_; }
    const Context& context(std::size_t i) const { return contexts_.at(i); }
    const Tolerances& tolerances() const { return tol_; }

    /// contexts[coarse] ⊆ contexts[fine].
    bool leq(std::size_t coarse, std::size_t fine) const { return leq_[coarse * size() + fine]; }

    /// Restriction Σ_fine → Σ_coarse as an index map; requires leq(coarse, fine).
    const std::vector<int>& restriction(std::size_t fine, std::size_t coarse) const;

    /// Pushes a mask of `fine` forward along the restriction to `coarse`.
    Mask restrict_mask(Mask mask, std::size_t fine, std::size_t coarse) const;

    /// All (coarse, fine) pairs with coarse ≤ fine.
    std::vector<std::pair<std::size_t, std::size_t>> arrows(bool include_reflexive) const;
    /// Covering relations only.
    std::vector<std::pair<std::size_t, std::size_t>> hasse_edges() const;

    std::optional<std::size_t> index_of(const std::string& id) const;
    /// Index of a context equal (mutual inclusion) to `ctx`.
    std::optional<std::size_t> find(const Context& ctx) const;

    /// Contexts containing P as an element.
    std::vector<std::size_t> containing(const Projection& p) const;

private:
    ContextPoset() = default;

    std::string id_;
    int dim_ = 0;
    Tolerances tol_;
    std::vector<Context> contexts_;
    std::vector<bool> leq_;
    std::vector<std::vector<int>> restrictions_;  // [fine * size + coarse]
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// One context per generator set, optionally closed under non-trivial
/// pairwise intersections (iterated to a fixed point). Throws PosetTooLarge
/// once the context count exceeds caps.max_contexts.
PosetPtr build_poset(const std::vector<std::vector<HermitianMatrix>>& generator_sets, bool close_under_intersection,
                     const Tolerances& tol = {}, const Caps& caps = {});

/// Same, starting from explicit contexts (duplicates dropped).
PosetPtr build_poset_from_contexts(std::vector<Context> seeds, bool close_under_intersection,
                                   const Tolerances& tol = {}, const Caps& caps = {});

}  // namespace toposq
