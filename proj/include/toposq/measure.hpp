#pragma once

// Measures on clopen subobjects. A measure sends each subobject to an
// order-reversing function V(N) → [0,1]. Three realisations share one
// interface: induced by a density state, tabulated from user data, and
// pointwise convex mixtures of other measures.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toposq/subobject.hpp"

namespace toposq {

/// Values indexed by context position in the poset.
struct OrderReversingFunction {
    std::string poset_id;
    std::vector<double> values;

    /// max over arrows V' ⊆ V of (values[V] − values[V']), floored at 0.
    double order_violation(const ContextPoset& poset) const;
    /// Distance of the furthest value from [0,1].
    double range_violation() const;
    bool is_constant(double c, double tol) const;
};

class Measure {
public:
    enum class Kind { Induced, Tabulated, Mixture };

    struct TableEntry {
        ClopenSubobject subobject;
        std::vector<double> values;
    };
    using Table = std::map<std::string, TableEntry>;  // keyed by ClopenSubobject::key()

    static Measure from_state(const DensityState& rho, PosetPtr poset);
    static Measure tabulated(PosetPtr poset, Table table);

    Kind kind() const { return kind_; }
    const PosetPtr& poset() const { return poset_; }
    /// The inducing state for Kind::Induced.
    const std::optional<DensityState>& state() const { return state_; }
    const Table* table() const { return table_.get(); }

    /// Default residual tolerance for identity checks: 1e-9 for induced and
    /// mixtures of induced measures, 1e-6 once a user table is involved.
    double default_order_tolerance() const;

    OrderReversingFunction evaluate(const ClopenSubobject& s) const;
    /// μ(S)(V) for a single context.
    double evaluate_at(const ClopenSubobject& s, std::size_t context) const;

    friend Measure convex_combine(double c, const Measure& a, const Measure& b);

private:
    Measure() = default;

    Kind kind_ = Kind::Induced;
    PosetPtr poset_;
    std::optional<DensityState> state_;
    std::shared_ptr<const Table> table_;
    double mix_c_ = 0;
    std::shared_ptr<const Measure> mix_a_, mix_b_;
};

/// μ_ρ(S)(V) = tr(ρ·α⁻¹(S_V)).
Measure measure_from_state(const DensityState& rho, PosetPtr poset);

/// Throws NotTabulated for a tabulated measure without an entry for S.
OrderReversingFunction evaluate_measure(const Measure& mu, const ClopenSubobject& s);

/// Pointwise c·μ₁ + (1−c)·μ₂. Throws BadCoefficient outside [0,1].
Measure convex_combine(double c, const Measure& a, const Measure& b);

struct PairFailure {
    std::size_t pair_index;
    std::size_t context;
    double residual;
};

struct AxiomReport {
    double normalisation_residual = 0;  ///< max_V |μ(Σ)(V) − 1|
    double max_modular_residual = 0;    ///< max |μ(S1∨S2) + μ(S1∧S2) − μ(S1) − μ(S2)|
    double max_additivity_residual = 0; ///< same, restricted to pairs with S1∧S2 = 0
    double max_order_violation = 0;     ///< order-reversal of every evaluated function
    std::size_t pairs_checked = 0;
    std::size_t disjoint_pairs = 0;
    std::vector<PairFailure> failures;
    bool passed = false;
};

AxiomReport check_axioms(const Measure& mu, const std::vector<std::pair<ClopenSubobject, ClopenSubobject>>& pairs,
                         const Tolerances& tol = {});

struct GlobalOverlap {
    std::size_t first, second;  ///< family indices
    std::size_t context;        ///< a context where they overlap
};

struct SigmaAdditivityReport {
    std::size_t context = 0;
    double join_value = 0;
    double sum_of_values = 0;
    double residual = 0;
    /// Members disjoint at the chosen context yet overlapping elsewhere.
    std::vector<GlobalOverlap> global_overlaps;
    bool passed = false;
};

/// μ(⋁ S_i)(V) = Σ μ(S_i)(V) for a family disjoint at V. Throws
/// NotLocallyDisjoint if two members meet at V.
SigmaAdditivityReport check_local_sigma_additivity(const Measure& mu, std::size_t context,
                                                   const std::vector<ClopenSubobject>& family,
                                                   const Tolerances& tol = {});

}  // namespace toposq
