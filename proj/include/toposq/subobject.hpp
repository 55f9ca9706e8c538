#pragma once

// Clopen subobjects of the spectral presheaf. A subobject is an antitone
// family of projections P_V (P_V ≤ P_V' whenever V' ⊆ V); each P_V is kept
// in its α encoding, a mask over V's minimal projections, so the lattice
// operations are exact set operations.

#include <string>
#include <vector>

#include "toposq/presheaf.hpp"

namespace toposq {

class ClopenSubobject {
public:
    static ClopenSubobject bottom(PosetPtr poset);
    static ClopenSubobject top(PosetPtr poset);
    /// Throws NotAntitone if the family violates the subobject condition.
    static ClopenSubobject from_masks(PosetPtr poset, std::vector<Mask> masks);
    /// Components given as projections, one per context in poset order.
    /// Throws NotInContext if a component does not lie in its context.
    static ClopenSubobject from_components(PosetPtr poset, const std::vector<Projection>& components);

    const PosetPtr& poset() const { return poset_; }
    std::size_t size() const { return masks_.size(); }
    Mask mask(std::size_t context) const { return masks_.at(context); }
    const std::vector<Mask>& masks() const { return masks_; }

    /// P_V = α⁻¹(S_V).
    Projection component(std::size_t context) const;
    ClopenSubset subset(std::size_t context) const;

    /// Content hash of the α encoding (context id → member set).
    std::string key() const;

    /// Subobject condition checked through the restriction maps.
    bool is_antitone() const;
    /// Same condition checked with proj_leq on the component matrices.
    bool is_antitone_by_matrices(const Tolerances& tol = {}) const;

    friend bool operator==(const ClopenSubobject& a, const ClopenSubobject& b) {
        return a.poset_->id() == b.poset_->id() && a.masks_ == b.masks_;
    }

private:
    ClopenSubobject(PosetPtr poset, std::vector<Mask> masks) : poset_(std::move(poset)), masks_(std::move(masks)) {}

    PosetPtr poset_;
    std::vector<Mask> masks_;
};

/// δ(P): at each context the least projection of V dominating P, i.e. the sum
/// of the minimals p_i with p_i·P ≠ 0.
ClopenSubobject daseinise(const Projection& p, PosetPtr poset);

ClopenSubobject sub_meet(const ClopenSubobject& a, const ClopenSubobject& b);
ClopenSubobject sub_join(const ClopenSubobject& a, const ClopenSubobject& b);

/// Heyting pseudo-complement: (¬S)_V = 1 − ⋁_{V'' ⊆ V} P_{S_V''}.
ClopenSubobject sub_negation(const ClopenSubobject& s);

/// Componentwise order.
bool sub_leq(const ClopenSubobject& a, const ClopenSubobject& b);

/// Every antitone family on the poset. Throws EnumerationTooLarge once more
/// than `cap` subobjects have been produced.
std::vector<ClopenSubobject> enumerate_subobjects(PosetPtr poset, std::size_t cap);

}  // namespace toposq
