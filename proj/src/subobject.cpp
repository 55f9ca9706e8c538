#include "toposq/subobject.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "toposq/hash.hpp"

namespace toposq {

namespace {

void require_same_poset(const ClopenSubobject& a, const ClopenSubobject& b) {
    if (a.poset()->id() != b.poset()->id())
        throw Error(ErrorKind::PosetMismatch, "subobjects live on different posets");
}

}  // namespace

ClopenSubobject ClopenSubobject::bottom(PosetPtr poset) {
    const std::size_t n = poset->size();
    return ClopenSubobject(std::move(poset), std::vector<Mask>(n, 0));
}

ClopenSubobject ClopenSubobject::top(PosetPtr poset) {
    std::vector<Mask> masks;
    masks.reserve(poset->size());
    for (const auto& c : poset->contexts()) masks.push_back(c.full_mask());
    return ClopenSubobject(std::move(poset), std::move(masks));
}

ClopenSubobject ClopenSubobject::from_masks(PosetPtr poset, std::vector<Mask> masks) {
    if (masks.size() != poset->size()) throw Error(ErrorKind::PosetMismatch, "one component per context is required");
    for (std::size_t i = 0; i < masks.size(); ++i)
        if (masks[i] & ~poset->context(i).full_mask())
            throw Error(ErrorKind::ContextMismatch, "component refers to a non-existent minimal projection");
    ClopenSubobject s(std::move(poset), std::move(masks));
    if (!s.is_antitone()) throw Error(ErrorKind::NotAntitone, "family violates the subobject condition");
    return s;
}

ClopenSubobject ClopenSubobject::from_components(PosetPtr poset, const std::vector<Projection>& components) {
    if (components.size() != poset->size())
        throw Error(ErrorKind::PosetMismatch, "one component per context is required");
    std::vector<Mask> masks;
    masks.reserve(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) {
        auto m = poset->context(i).mask_of(components[i], poset->tolerances());
        if (!m) throw Error(ErrorKind::NotInContext, "component " + std::to_string(i) + " does not lie in its context");
        masks.push_back(*m);
    }
    return from_masks(std::move(poset), std::move(masks));
}

Projection ClopenSubobject::component(std::size_t context) const {
    return poset_->context(context).projection_of(masks_.at(context));
}

ClopenSubset ClopenSubobject::subset(std::size_t context) const {
    return {poset_->context(context).id(), to_members(masks_.at(context))};
}

std::string ClopenSubobject::key() const {
    std::map<std::string, Mask> by_id;
    for (std::size_t i = 0; i < masks_.size(); ++i) by_id.emplace(poset_->context(i).id(), masks_[i]);
    std::ostringstream os;
    for (const auto& [id, mask] : by_id) {
        os << id << ':';
        for (int m : to_members(mask)) os << m << ',';
        os << ';';
    }
    return content_hash(os.str());
}

bool ClopenSubobject::is_antitone() const {
    for (auto [coarse, fine] : poset_->arrows(false)) {
        const Mask pushed = poset_->restrict_mask(masks_[fine], fine, coarse);
        if (pushed & ~masks_[coarse]) return false;
    }
    return true;
}

bool ClopenSubobject::is_antitone_by_matrices(const Tolerances& tol) const {
    for (auto [coarse, fine] : poset_->arrows(false))
        if (!proj_leq(component(fine), component(coarse), tol)) return false;
    return true;
}

ClopenSubobject daseinise(const Projection& p, PosetPtr poset) {
    require_same_dim(p.dim(), poset->dim(), "daseinise");
    const double tol = poset->tolerances().idem;
    std::vector<Mask> masks;
    masks.reserve(poset->size());
    for (const auto& ctx : poset->contexts()) {
        Mask m = 0;
        for (int i = 0; i < ctx.size(); ++i)
            if ((ctx.minimal(i).matrix() * p.matrix()).norm() > tol) m |= Mask{1} << i;
        masks.push_back(m);
    }
    return ClopenSubobject::from_masks(std::move(poset), std::move(masks));
}

ClopenSubobject sub_meet(const ClopenSubobject& a, const ClopenSubobject& b) {
    require_same_poset(a, b);
    std::vector<Mask> masks(a.size());
    for (std::size_t i = 0; i < masks.size(); ++i) masks[i] = a.mask(i) & b.mask(i);
    return ClopenSubobject::from_masks(a.poset(), std::move(masks));
}

ClopenSubobject sub_join(const ClopenSubobject& a, const ClopenSubobject& b) {
    require_same_poset(a, b);
    std::vector<Mask> masks(a.size());
    for (std::size_t i = 0; i < masks.size(); ++i) masks[i] = a.mask(i) | b.mask(i);
    return ClopenSubobject::from_masks(a.poset(), std::move(masks));
}

ClopenSubobject sub_negation(const ClopenSubobject& s) {
    const auto& poset = *s.poset();
    const std::size_t n = poset.size();
    std::vector<Mask> masks(n);
    for (std::size_t v = 0; v < n; ++v) {
        // points of Σ_V whose restriction to some subcontext lands in S
        Mask reached = 0;
        for (std::size_t sub = 0; sub < n; ++sub) {
            if (!poset.leq(sub, v)) continue;
            const auto& map = poset.restriction(v, sub);
            for (std::size_t i = 0; i < map.size(); ++i)
                if (s.mask(sub) & (Mask{1} << map[i])) reached |= Mask{1} << i;
        }
        masks[v] = poset.context(v).full_mask() & ~reached;
    }
    return ClopenSubobject::from_masks(s.poset(), std::move(masks));
}

bool sub_leq(const ClopenSubobject& a, const ClopenSubobject& b) {
    require_same_poset(a, b);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.mask(i) & ~b.mask(i)) return false;
    return true;
}

std::vector<ClopenSubobject> enumerate_subobjects(PosetPtr poset, std::size_t cap) {
    const std::size_t n = poset->size();
    // finer contexts first: a proper subcontext always has fewer minimals
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return poset->context(a).size() > poset->context(b).size();
    });

    std::vector<ClopenSubobject> out;
    std::vector<Mask> masks(n, 0);
    std::vector<bool> assigned(n, false);

    auto recurse = [&](auto&& self, std::size_t depth) -> void {
        if (depth == n) {
            if (out.size() >= cap)
                throw Error(ErrorKind::EnumerationTooLarge, "more than " + std::to_string(cap) + " subobjects");
            out.push_back(ClopenSubobject::from_masks(poset, masks));
            return;
        }
        const std::size_t v = order[depth];
        Mask required = 0;
        for (std::size_t f = 0; f < n; ++f)
            if (assigned[f] && f != v && poset->leq(v, f)) required |= poset->restrict_mask(masks[f], f, v);
        const Mask full = poset->context(v).full_mask();
        assigned[v] = true;
        // iterate the supersets of `required` inside `full`
        const Mask free_bits = full & ~required;
        Mask sub = 0;
        while (true) {
            masks[v] = required | sub;
            self(self, depth + 1);
            if (sub == free_bits) break;
            sub = (sub - free_bits) & free_bits;
        }
        assigned[v] = false;
        masks[v] = 0;
    };
    recurse(recurse, 0);
    return out;
}

}  // namespace toposq
