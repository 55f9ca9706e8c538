#include "toposq/presheaf.hpp"

#include <algorithm>
#include <bit>

namespace toposq {

namespace {

void require_context(const std::string& id, const Context& ctx) {
    if (id != ctx.id()) throw Error(ErrorKind::ContextMismatch, "element belongs to context " + id + ", not " + ctx.id());
}

void require_index(int index, const Context& ctx) {
    if (index < 0 || index >= ctx.size())
        throw Error(ErrorKind::ContextMismatch, "minimal index " + std::to_string(index) + " out of range");
}

}  // namespace

Mask to_mask(const std::vector<int>& members) {
    Mask m = 0;
    for (int i : members) {
        if (i < 0 || i >= kMaxMinimals) throw Error(ErrorKind::ContextMismatch, "member index out of range");
        m |= Mask{1} << i;
    }
    return m;
}

std::vector<int> to_members(Mask mask) {
    std::vector<int> out;
    while (mask) {
        out.push_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return out;
}

double evaluate(const SpectralElement& lambda, const HermitianMatrix& a, const Context& ctx, const Tolerances& tol) {
    require_context(lambda.context_id, ctx);
    require_index(lambda.minimal_index, ctx);
    if (!ctx.contains(a.matrix(), tol)) throw Error(ErrorKind::NotInContext, "operator is not an element of the context");
    const Projection& p = ctx.minimal(lambda.minimal_index);
    return (p.matrix() * a.matrix()).trace().real() / p.rank();
}

ClopenSubset alpha(const Projection& p, const Context& ctx, const Tolerances& tol) {
    auto mask = ctx.mask_of(p, tol);
    if (!mask) throw Error(ErrorKind::NotInContext, "projection is not an element of the context");
    return {ctx.id(), to_members(*mask)};
}

Projection alpha_inverse(const ClopenSubset& s, const Context& ctx) {
    require_context(s.context_id, ctx);
    for (int i : s.members) require_index(i, ctx);
    return ctx.projection_of(to_mask(s.members));
}

SpectralElement restrict(const SpectralElement& lambda, const Context& from, const Context& to, const Tolerances& tol) {
    require_context(lambda.context_id, from);
    require_index(lambda.minimal_index, from);
    if (from.id() == to.id()) return lambda;
    if (!is_subcontext(to, from, tol))
        throw Error(ErrorKind::NotSubcontext, "target context is not contained in the source context");
    const Projection& p = from.minimal(lambda.minimal_index);
    int target = -1;
    for (int j = 0; j < to.size(); ++j) {
        if (!proj_leq(p, to.minimal(j), tol)) continue;
        if (target >= 0) throw Error(ErrorKind::NoUniqueTarget, "minimal lies under several target minimals");
        target = j;
    }
    if (target < 0) throw Error(ErrorKind::NoUniqueTarget, "minimal lies under no target minimal");
    return {to.id(), target};
}

}  // namespace toposq
