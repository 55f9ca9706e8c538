#include "toposq/measure.hpp"

#include <algorithm>
#include <cmath>

namespace toposq {

namespace {

void require_poset(const Measure& mu, const ClopenSubobject& s) {
    if (mu.poset()->id() != s.poset()->id()) throw Error(ErrorKind::PosetMismatch, "subobject is on another poset");
}

}  // namespace

double OrderReversingFunction::order_violation(const ContextPoset& poset) const {
    double worst = 0;
    for (auto [coarse, fine] : poset.arrows(false)) worst = std::max(worst, values[fine] - values[coarse]);
    return worst;
}

double OrderReversingFunction::range_violation() const {
    double worst = 0;
    for (double v : values) worst = std::max({worst, -v, v - 1.0});
    return worst;
}

bool OrderReversingFunction::is_constant(double c, double tol) const {
    return std::all_of(values.begin(), values.end(), [&](double v) { return std::abs(v - c) <= tol; });
}

Measure Measure::from_state(const DensityState& rho, PosetPtr poset) {
    require_same_dim(rho.dim(), poset->dim(), "measure_from_state");
    Measure mu;
    mu.kind_ = Kind::Induced;
    mu.poset_ = std::move(poset);
    mu.state_ = rho;
    return mu;
}

Measure Measure::tabulated(PosetPtr poset, Table table) {
    for (const auto& [key, entry] : table) {
        if (entry.subobject.poset()->id() != poset->id())
            throw Error(ErrorKind::PosetMismatch, "table entry is on another poset");
        if (entry.values.size() != poset->size())
            throw Error(ErrorKind::Validation, "table entry needs one value per context");
    }
    Measure mu;
    mu.kind_ = Kind::Tabulated;
    mu.poset_ = std::move(poset);
    mu.table_ = std::make_shared<const Table>(std::move(table));
    return mu;
}

double Measure::default_order_tolerance() const {
    switch (kind_) {
        case Kind::Induced: return 1e-9;
        case Kind::Tabulated: return 1e-6;
        case Kind::Mixture:
            return std::max(mix_a_->default_order_tolerance(), mix_b_->default_order_tolerance());
    }
    return 1e-6;
}

double Measure::evaluate_at(const ClopenSubobject& s, std::size_t context) const {
    require_poset(*this, s);
    switch (kind_) {
        case Kind::Induced: return state_->expectation(s.component(context).matrix());
        case Kind::Tabulated: {
            auto it = table_->find(s.key());
            if (it == table_->end()) throw Error(ErrorKind::NotTabulated, "no table entry for subobject " + s.key());
            return it->second.values.at(context);
        }
        case Kind::Mixture:
            return mix_c_ * mix_a_->evaluate_at(s, context) + (1.0 - mix_c_) * mix_b_->evaluate_at(s, context);
    }
    return 0;
}

OrderReversingFunction Measure::evaluate(const ClopenSubobject& s) const {
    require_poset(*this, s);
    OrderReversingFunction f{poset_->id(), std::vector<double>(poset_->size())};
    if (kind_ == Kind::Tabulated) {
        auto it = table_->find(s.key());
        if (it == table_->end()) throw Error(ErrorKind::NotTabulated, "no table entry for subobject " + s.key());
        f.values = it->second.values;
    } else {
        for (std::size_t v = 0; v < poset_->size(); ++v) f.values[v] = evaluate_at(s, v);
    }
    // values inside the tolerance band are clamped; anything further out is
    // left for check_axioms to report
    const double band = default_order_tolerance();
    for (double& v : f.values) {
        if (v < 0 && v >= -band) v = 0;
        if (v > 1 && v <= 1 + band) v = 1;
    }
    return f;
}

Measure measure_from_state(const DensityState& rho, PosetPtr poset) { return Measure::from_state(rho, std::move(poset)); }

OrderReversingFunction evaluate_measure(const Measure& mu, const ClopenSubobject& s) { return mu.evaluate(s); }

Measure convex_combine(double c, const Measure& a, const Measure& b) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::BadCoefficient, "coefficient must lie in [0,1]");
    if (a.poset()->id() != b.poset()->id()) throw Error(ErrorKind::PosetMismatch, "measures live on different posets");
    Measure mu;
    mu.kind_ = Measure::Kind::Mixture;
    mu.poset_ = a.poset();
    mu.mix_c_ = c;
    mu.mix_a_ = std::make_shared<const Measure>(a);
    mu.mix_b_ = std::make_shared<const Measure>(b);
    return mu;
}

AxiomReport check_axioms(const Measure& mu, const std::vector<std::pair<ClopenSubobject, ClopenSubobject>>& pairs,
                         const Tolerances& tol) {
    const auto& poset = *mu.poset();
    AxiomReport report;

    const auto top = mu.evaluate(ClopenSubobject::top(mu.poset()));
    for (double v : top.values) report.normalisation_residual = std::max(report.normalisation_residual, std::abs(v - 1));
    report.max_order_violation = top.order_violation(poset);

    const auto bottom = ClopenSubobject::bottom(mu.poset());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& [s1, s2] = pairs[k];
        const auto join = sub_join(s1, s2);
        const auto meet = sub_meet(s1, s2);
        const auto f1 = mu.evaluate(s1), f2 = mu.evaluate(s2), fj = mu.evaluate(join), fm = mu.evaluate(meet);
        for (const auto* f : {&f1, &f2, &fj, &fm})
            report.max_order_violation = std::max(report.max_order_violation, f->order_violation(poset));

        const bool disjoint = meet == bottom;
        if (disjoint) ++report.disjoint_pairs;
        double worst = 0;
        std::size_t worst_ctx = 0;
        for (std::size_t v = 0; v < poset.size(); ++v) {
            const double r = std::abs(fj.values[v] + fm.values[v] - f1.values[v] - f2.values[v]);
            if (r > worst) {
                worst = r;
                worst_ctx = v;
            }
            if (disjoint)
                report.max_additivity_residual =
                    std::max(report.max_additivity_residual, std::abs(fj.values[v] - f1.values[v] - f2.values[v]));
        }
        report.max_modular_residual = std::max(report.max_modular_residual, worst);
        if (worst > tol.order) report.failures.push_back({k, worst_ctx, worst});
    }
    report.pairs_checked = pairs.size();
    report.passed = report.failures.empty() && report.normalisation_residual <= tol.order &&
                    report.max_order_violation <= tol.order;
    return report;
}

SigmaAdditivityReport check_local_sigma_additivity(const Measure& mu, std::size_t context,
                                                   const std::vector<ClopenSubobject>& family,
                                                   const Tolerances& tol) {
    const auto& poset = *mu.poset();
    if (context >= poset.size()) throw Error(ErrorKind::ContextMismatch, "context index out of range");
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (family[i].mask(context) & family[j].mask(context))
                throw Error(ErrorKind::NotLocallyDisjoint, "family members " + std::to_string(j) + " and " +
                                                               std::to_string(i) + " overlap at the chosen context");

    SigmaAdditivityReport report;
    report.context = context;
    auto join = ClopenSubobject::bottom(mu.poset());
    for (const auto& s : family) {
        join = sub_join(join, s);
        report.sum_of_values += mu.evaluate_at(s, context);
    }
    report.join_value = mu.evaluate_at(join, context);
    report.residual = std::abs(report.join_value - report.sum_of_values);

    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j)
            for (std::size_t v = 0; v < poset.size(); ++v)
                if (family[i].mask(v) & family[j].mask(v)) {
                    report.global_overlaps.push_back({i, j, v});
                    break;
                }
    report.passed = report.residual <= tol.order;
    return report;
}

}  // namespace toposq
