#include "toposq/quantum_logic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace toposq {

PseudoState pseudo_state(const Vector& psi, PosetPtr poset, const Tolerances& tol) {
    require_same_dim(static_cast<int>(psi.size()), poset->dim(), "pseudo_state");
    if (std::abs(psi.norm() - 1.0) > tol.state) throw Error(ErrorKind::NotUnitVector, "vector norm differs from 1");

    auto by_daseinisation = daseinise(Projection::onto(psi), poset);

    std::vector<Mask> masks;
    masks.reserve(poset->size());
    for (const auto& ctx : poset->contexts()) {
        std::vector<double> weight(static_cast<std::size_t>(ctx.size()));
        for (int i = 0; i < ctx.size(); ++i)
            weight[static_cast<std::size_t>(i)] = psi.dot(ctx.minimal(i).matrix() * psi).real();
        Mask meet = ctx.full_mask();
        for (Mask q = 1; q <= ctx.full_mask(); ++q) {
            double expectation = 0;
            for (int i = 0; i < ctx.size(); ++i)
                if (q & (Mask{1} << i)) expectation += weight[static_cast<std::size_t>(i)];
            if (std::abs(expectation - 1.0) <= tol.state) meet &= q;
        }
        masks.push_back(meet);
    }
    auto by_expectation = ClopenSubobject::from_masks(poset, std::move(masks));
    const bool agree = by_daseinisation == by_expectation;
    return {psi, std::move(by_daseinisation), std::move(by_expectation), agree};
}

MinimalityReport check_minimality(const PseudoState& ps, const std::vector<ClopenSubobject>& pool,
                                  const Tolerances& tol) {
    const auto mu = measure_from_state(DensityState::pure(ps.psi, tol), ps.subobject.poset());
    MinimalityReport report;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const auto& t = pool[k];
        if (!sub_leq(t, ps.subobject) || t == ps.subobject) continue;
        ++report.strictly_smaller;
        if (mu.evaluate(t).is_constant(1.0, tol.order)) report.violators.push_back(k);
    }
    report.passed = report.violators.empty();
    return report;
}

MinimalityReport check_minimality_exhaustive(const PseudoState& ps, std::size_t cap, const Tolerances& tol) {
    return check_minimality(ps, enumerate_subobjects(ps.subobject.poset(), cap), tol);
}

ExpectationResult expectation_via_measure(const HermitianMatrix& a, const Measure& mu, const Tolerances& tol) {
    const auto& poset = *mu.poset();
    require_same_dim(a.dim(), poset.dim(), "expectation_via_measure");
    const auto spectrum = spectral_decompose(a, tol);

    ExpectationResult result;
    if (spectrum.size() == 1) {
        result.va_trivial = true;
    } else {
        result.va_context = poset.find(context_from_generators({a}, tol));
        result.degraded = !result.va_context.has_value();
    }

    bool attained = result.va_context.has_value() || result.va_trivial;
    for (const auto& [eigenvalue, projection] : spectrum) {
        const auto f = mu.evaluate(daseinise(projection, mu.poset()));
        ExpectationTerm term;
        term.eigenvalue = eigenvalue;
        const auto it = std::min_element(f.values.begin(), f.values.end());
        term.minimum = *it;
        term.argmin = static_cast<std::size_t>(it - f.values.begin());
        if (result.va_context) {
            term.at_va = f.values[*result.va_context];
            if (*term.at_va - term.minimum > tol.order) attained = false;
        }
        result.value += eigenvalue * term.minimum;
        result.coefficient_sum += std::abs(eigenvalue);
        result.terms.push_back(term);
    }
    result.minimum_attained_at_va = attained;
    return result;
}

TruncatedOperator truncate_spectral_sum(const HermitianMatrix& b, std::size_t terms, const Tolerances& tol) {
    auto spectrum = spectral_decompose(b, tol);
    std::stable_sort(spectrum.begin(), spectrum.end(),
                     [](const Eigenpair& x, const Eigenpair& y) { return std::abs(x.value) > std::abs(y.value); });
    Matrix approx = Matrix::Zero(b.dim(), b.dim());
    double gap = 0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (i < terms)
            approx += spectrum[i].value * spectrum[i].projection.matrix();
        else
            gap = std::max(gap, std::abs(spectrum[i].value));
    }
    return {HermitianMatrix::from(approx, tol), gap};
}

bool is_global_section(const ContextPoset& poset, const GlobalSectionCandidate& candidate) {
    if (candidate.choice.size() != poset.size()) return false;
    for (std::size_t v = 0; v < poset.size(); ++v)
        if (candidate.choice[v] < 0 || candidate.choice[v] >= poset.context(v).size()) return false;
    for (auto [coarse, fine] : poset.arrows(false))
        if (poset.restriction(fine, coarse)[static_cast<std::size_t>(candidate.choice[fine])] != candidate.choice[coarse])
            return false;
    return true;
}

namespace {

/// For two contexts, labels of the shared-projection blocks each minimal falls
/// into (connected components of the overlap graph). Empty when the contexts
/// share only 0 and 1.
struct SharedBlocks {
    std::vector<int> label_a, label_b;
};

SharedBlocks shared_blocks(const Context& a, const Context& b, double tol) {
    const int na = a.size(), nb = b.size();
    std::vector<int> parent(static_cast<std::size_t>(na + nb));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            if ((a.minimal(i).matrix() * b.minimal(j).matrix()).norm() > tol)
                parent[static_cast<std::size_t>(find(i))] = find(na + j);
    SharedBlocks out;
    for (int i = 0; i < na; ++i) out.label_a.push_back(find(i));
    for (int j = 0; j < nb; ++j) out.label_b.push_back(find(na + j));
    const auto first = out.label_a.front();
    if (std::all_of(out.label_a.begin(), out.label_a.end(), [&](int l) { return l == first; })) return {};
    return out;
}

struct CrossConstraint {
    std::size_t other;
    std::vector<int> mine, theirs;
};

}  // namespace

SearchResult global_section_search(const ContextPoset& poset, std::size_t node_cap) {
    const std::size_t n = poset.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = poset.context(a);
        const auto& cb = poset.context(b);
        if (ca.size() != cb.size()) return ca.size() > cb.size();
        return ca.id() < cb.id();
    });

    std::vector<std::vector<CrossConstraint>> cross(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || poset.leq(a, b) || poset.leq(b, a)) continue;
            auto blocks = shared_blocks(poset.context(a), poset.context(b), poset.tolerances().idem);
            if (blocks.label_a.empty()) continue;
            cross[a].push_back({b, std::move(blocks.label_a), std::move(blocks.label_b)});
        }

    SearchResult result;
    std::vector<int> choice(n, -1);

    auto consistent = [&](std::size_t v, int i) {
        for (std::size_t u = 0; u < n; ++u) {
            if (choice[u] < 0 || u == v) continue;
            if (poset.leq(v, u) && poset.restriction(u, v)[static_cast<std::size_t>(choice[u])] != i) return false;
            if (poset.leq(u, v) && poset.restriction(v, u)[static_cast<std::size_t>(i)] != choice[u]) return false;
        }
        for (const auto& c : cross[v])
            if (choice[c.other] >= 0 &&
                c.mine[static_cast<std::size_t>(i)] != c.theirs[static_cast<std::size_t>(choice[c.other])])
                return false;
        return true;
    };

    auto recurse = [&](auto&& self, std::size_t depth) -> bool {
        result.max_depth = std::max(result.max_depth, depth);
        if (depth == n) return true;
        const std::size_t v = order[depth];
        for (int i = 0; i < poset.context(v).size(); ++i) {
            if (++result.nodes > node_cap)
                throw Error(ErrorKind::SearchBudgetExceeded, "node cap " + std::to_string(node_cap) + " reached");
            if (!consistent(v, i)) continue;
            choice[v] = i;
            if (self(self, depth + 1)) return true;
            choice[v] = -1;
        }
        return false;
    };

    if (recurse(recurse, 0)) result.section = GlobalSectionCandidate{choice};
    return result;
}

}  // namespace toposq
