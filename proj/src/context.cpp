#include "toposq/context.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "toposq/hash.hpp"

namespace toposq {

namespace {

constexpr double kCanonicalResolution = 1e-6;

std::vector<std::int64_t> rounded_entries(const Projection& p) {
    const Matrix& m = p.matrix();
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(2 * m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back(quantize(m(r, c).real(), kCanonicalResolution));
            out.push_back(quantize(m(r, c).imag(), kCanonicalResolution));
        }
    return out;
}

bool canonical_less(const Projection& a, const Projection& b) {
    if (a.rank() != b.rank()) return a.rank() < b.rank();
    return rounded_entries(a) < rounded_entries(b);
}

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& px = parent[static_cast<std::size_t>(x)];
            px = parent[static_cast<std::size_t>(px)];
            x = px;
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

bool same_context(const Context& a, const Context& b, const Tolerances& tol) {
    if (a.id() == b.id()) return true;
    if (a.size() != b.size() || a.dim() != b.dim()) return false;
    return restriction_map(a, b, tol).has_value() && restriction_map(b, a, tol).has_value();
}

std::optional<std::size_t> find_equal(const std::vector<Context>& list, const Context& c, const Tolerances& tol) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (same_context(list[i], c, tol)) return i;
    return std::nullopt;
}

[[noreturn]] void too_large(std::size_t cap) {
    throw Error(ErrorKind::PosetTooLarge, "context count exceeds cap " + std::to_string(cap));
}

}  // namespace

Context Context::from_minimals(std::vector<Projection> minimals, const Tolerances& tol) {
    if (minimals.size() < 2) throw Error(ErrorKind::TrivialContext, "a context needs at least two minimal projections");
    if (minimals.size() > static_cast<std::size_t>(kMaxMinimals))
        throw Error(ErrorKind::Validation, "too many minimal projections");
    const int n = minimals.front().dim();
    Matrix sum = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < minimals.size(); ++i) {
        require_same_dim(n, minimals[i].dim(), "Context::from_minimals");
        if (minimals[i].rank() == 0) throw Error(ErrorKind::Validation, "zero projection among minimals");
        for (std::size_t j = 0; j < i; ++j)
            if ((minimals[i].matrix() * minimals[j].matrix()).norm() > tol.idem)
                throw Error(ErrorKind::Validation, "minimal projections are not pairwise orthogonal");
        sum += minimals[i].matrix();
    }
    if ((sum - Matrix::Identity(n, n)).norm() > tol.idem * n)
        throw Error(ErrorKind::Validation, "minimal projections do not sum to the identity");

    std::stable_sort(minimals.begin(), minimals.end(), canonical_less);
    Context ctx;
    ctx.dim_ = n;
    ctx.minimals_ = std::move(minimals);
    ctx.id_ = content_hash(ctx.canonical_text());
    return ctx;
}

Mask Context::full_mask() const {
    return size() >= 64 ? ~Mask{0} : ((Mask{1} << size()) - 1);
}

std::string Context::canonical_text() const {
    std::ostringstream os;
    os << "dim=" << dim_;
    for (const auto& p : minimals_) {
        os << ";r" << p.rank() << ':';
        for (auto v : rounded_entries(p)) os << v << ',';
    }
    return os.str();
}

bool Context::contains(const Matrix& a, const Tolerances& tol) const {
    require_same_dim(dim_, static_cast<int>(a.rows()), "Context::contains");
    Matrix rebuilt = Matrix::Zero(dim_, dim_);
    for (const auto& p : minimals_) {
        const Complex coeff = (p.matrix() * a).trace() / static_cast<double>(p.rank());
        rebuilt += coeff * p.matrix();
    }
    return (a - rebuilt).norm() <= tol.idem * dim_;
}

std::optional<Mask> Context::mask_of(const Projection& p, const Tolerances& tol) const {
    require_same_dim(dim_, p.dim(), "Context::mask_of");
    if (!contains(p.matrix(), tol)) return std::nullopt;
    Mask mask = 0;
    int rank = 0;
    for (int i = 0; i < size(); ++i)
        if (proj_leq(minimals_[static_cast<std::size_t>(i)], p, tol)) {
            mask |= Mask{1} << i;
            rank += minimals_[static_cast<std::size_t>(i)].rank();
        }
    if (rank != p.rank()) return std::nullopt;
    return mask;
}

Projection Context::projection_of(Mask mask) const {
    if (mask == 0) return Projection::zero(dim_);
    if (mask == full_mask()) return Projection::identity(dim_);
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < size(); ++i)
        if (mask & (Mask{1} << i)) sum += minimals_[static_cast<std::size_t>(i)].matrix();
    return Projection::rounded(sum);
}

Context context_from_generators(const std::vector<HermitianMatrix>& ops, const Tolerances& tol) {
    if (ops.empty()) throw Error(ErrorKind::TrivialContext, "no generators");
    const int n = ops.front().dim();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        require_same_dim(n, ops[i].dim(), "context_from_generators");
        for (std::size_t j = 0; j < i; ++j)
            if (!commute(ops[i].matrix(), ops[j].matrix(), tol.idem * n))
                throw Error(ErrorKind::NonCommuting,
                            "generators " + std::to_string(j) + " and " + std::to_string(i) + " do not commute");
    }

    std::vector<Projection> parts{Projection::identity(n)};
    for (const auto& op : ops) {
        const auto eig = spectral_decompose(op, tol);
        std::vector<Projection> refined;
        for (const auto& part : parts)
            for (const auto& e : eig) {
                const Matrix product = part.matrix() * e.projection.matrix();
                if (product.trace().real() > 0.5) refined.push_back(Projection::rounded(product));
            }
        parts = std::move(refined);
    }
    if (parts.size() < 2) throw Error(ErrorKind::TrivialContext, "generators only produce the trivial context");
    return Context::from_minimals(std::move(parts), tol);
}

std::optional<Context> context_intersection(const Context& a, const Context& b, const Tolerances& tol) {
    require_same_dim(a.dim(), b.dim(), "context_intersection");
    // Minimals of a and b that overlap must sit under the same shared
    // projection, so the shared minimals are the connected components of the
    // overlap graph.
    const int na = a.size();
    DisjointSets sets(na + b.size());
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < b.size(); ++j)
            if ((a.minimal(i).matrix() * b.minimal(j).matrix()).norm() > tol.idem) sets.unite(i, na + j);

    std::vector<int> roots;
    std::vector<Matrix> sums;
    for (int i = 0; i < na; ++i) {
        const int r = sets.find(i);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            sums.push_back(a.minimal(i).matrix());
        } else {
            sums[static_cast<std::size_t>(it - roots.begin())] += a.minimal(i).matrix();
        }
    }
    if (sums.size() < 2) return std::nullopt;
    std::vector<Projection> minimals;
    minimals.reserve(sums.size());
    for (const auto& s : sums) minimals.push_back(Projection::rounded(s));
    return Context::from_minimals(std::move(minimals), tol);
}

std::optional<std::vector<int>> restriction_map(const Context& fine, const Context& coarse, const Tolerances& tol) {
    require_same_dim(fine.dim(), coarse.dim(), "restriction_map");
    if (coarse.size() > fine.size()) return std::nullopt;
    std::vector<int> map(static_cast<std::size_t>(fine.size()), -1);
    std::vector<int> rank_under(static_cast<std::size_t>(coarse.size()), 0);
    for (int i = 0; i < fine.size(); ++i) {
        int target = -1;
        for (int j = 0; j < coarse.size(); ++j) {
            if (!proj_leq(fine.minimal(i), coarse.minimal(j), tol)) continue;
            if (target >= 0)
                throw Error(ErrorKind::NoUniqueTarget, "minimal projection lies under two minimals of the coarser context");
            target = j;
        }
        if (target < 0) return std::nullopt;
        map[static_cast<std::size_t>(i)] = target;
        rank_under[static_cast<std::size_t>(target)] += fine.minimal(i).rank();
    }
    // the converse direction: each coarse minimal is exactly the sum of the
    // fine minimals mapped onto it
    for (int j = 0; j < coarse.size(); ++j)
        if (rank_under[static_cast<std::size_t>(j)] != coarse.minimal(j).rank()) return std::nullopt;
    return map;
}

bool is_subcontext(const Context& coarse, const Context& fine, const Tolerances& tol) {
    return restriction_map(fine, coarse, tol).has_value();
}

PosetPtr ContextPoset::from_contexts(std::vector<Context> contexts, const Tolerances& tol, const Caps& caps) {
    tol.validate();
    if (contexts.empty()) throw Error(ErrorKind::Validation, "a poset needs at least one context");
    auto poset = std::shared_ptr<ContextPoset>(new ContextPoset());
    poset->tol_ = tol;
    poset->dim_ = contexts.front().dim();
    if (poset->dim_ > caps.max_dim)
        throw Error(ErrorKind::Validation, "dimension " + std::to_string(poset->dim_) + " exceeds cap " +
                                               std::to_string(caps.max_dim));

    for (auto& c : contexts) {
        require_same_dim(poset->dim_, c.dim(), "ContextPoset");
        if (poset->by_id_.count(c.id()) || find_equal(poset->contexts_, c, tol)) continue;
        poset->by_id_.emplace(c.id(), poset->contexts_.size());
        poset->contexts_.push_back(std::move(c));
        if (poset->contexts_.size() > caps.max_contexts) too_large(caps.max_contexts);
    }

    const std::size_t n = poset->contexts_.size();
    poset->leq_.assign(n * n, false);
    poset->restrictions_.assign(n * n, {});
    for (std::size_t fine = 0; fine < n; ++fine) {
        for (std::size_t coarse = 0; coarse < n; ++coarse) {
            const Context& f = poset->contexts_[fine];
            const Context& c = poset->contexts_[coarse];
            std::optional<std::vector<int>> map;
            if (fine == coarse) {
                std::vector<int> id(static_cast<std::size_t>(f.size()));
                std::iota(id.begin(), id.end(), 0);
                map = std::move(id);
            } else if (c.size() < f.size()) {
                map = restriction_map(f, c, tol);
            }
            if (map) {
                poset->leq_[coarse * n + fine] = true;
                poset->restrictions_[fine * n + coarse] = std::move(*map);
            }
        }
    }

    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (!poset->leq(a, b)) continue;
            if (a != b && poset->leq(b, a)) throw Error(ErrorKind::Validation, "inclusion order is not antisymmetric");
            for (std::size_t c = 0; c < n; ++c)
                if (poset->leq(b, c) && !poset->leq(a, c))
                    throw Error(ErrorKind::Validation, "inclusion order is not transitive");
        }

    std::string ids;
    for (const auto& c : poset->contexts_) ids += c.id() + ";";
    poset->id_ = content_hash(ids);
    return poset;
}

const std::vector<int>& ContextPoset::restriction(std::size_t fine, std::size_t coarse) const {
    if (!leq(coarse, fine)) throw Error(ErrorKind::NotSubcontext, "no arrow between the given contexts");
    return restrictions_[fine * size() + coarse];
}

Mask ContextPoset::restrict_mask(Mask mask, std::size_t fine, std::size_t coarse) const {
    const auto& map = restriction(fine, coarse);
    Mask out = 0;
    for (std::size_t i = 0; i < map.size(); ++i)
        if (mask & (Mask{1} << i)) out |= Mask{1} << map[i];
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> ContextPoset::arrows(bool include_reflexive) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t c = 0; c < size(); ++c)
        for (std::size_t f = 0; f < size(); ++f)
            if (leq(c, f) && (include_reflexive || c != f)) out.emplace_back(c, f);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> ContextPoset::hasse_edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (auto [c, f] : arrows(false)) {
        bool covered = true;
        for (std::size_t m = 0; m < size() && covered; ++m)
            if (m != c && m != f && leq(c, m) && leq(m, f)) covered = false;
        if (covered) out.emplace_back(c, f);
    }
    return out;
}

std::optional<std::size_t> ContextPoset::index_of(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> ContextPoset::find(const Context& ctx) const {
    if (auto i = index_of(ctx.id())) return i;
    return find_equal(contexts_, ctx, tol_);
}

std::vector<std::size_t> ContextPoset::containing(const Projection& p) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
        if (contexts_[i].mask_of(p, tol_)) out.push_back(i);
    return out;
}

PosetPtr build_poset(const std::vector<std::vector<HermitianMatrix>>& generator_sets, bool close_under_intersection,
                     const Tolerances& tol, const Caps& caps) {
    tol.validate();
    if (generator_sets.empty()) throw Error(ErrorKind::Validation, "no generator sets");
    std::vector<Context> seeds;
    for (const auto& set : generator_sets) seeds.push_back(context_from_generators(set, tol));
    return build_poset_from_contexts(std::move(seeds), close_under_intersection, tol, caps);
}

PosetPtr build_poset_from_contexts(std::vector<Context> seeds, bool close_under_intersection, const Tolerances& tol,
                                   const Caps& caps) {
    tol.validate();
    if (seeds.empty()) throw Error(ErrorKind::Validation, "no contexts");
    std::vector<Context> contexts;
    for (auto& c : seeds) {
        if (!contexts.empty()) require_same_dim(contexts.front().dim(), c.dim(), "build_poset");
        if (find_equal(contexts, c, tol)) continue;
        contexts.push_back(std::move(c));
        if (contexts.size() > caps.max_contexts) too_large(caps.max_contexts);
    }

    if (close_under_intersection) {
        for (std::size_t j = 1; j < contexts.size(); ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                if (is_subcontext(contexts[i], contexts[j], tol) || is_subcontext(contexts[j], contexts[i], tol))
                    continue;
                auto shared = context_intersection(contexts[i], contexts[j], tol);
                if (!shared || find_equal(contexts, *shared, tol)) continue;
                contexts.push_back(std::move(*shared));
                if (contexts.size() > caps.max_contexts) too_large(caps.max_contexts);
            }
        }
    }
    return ContextPoset::from_contexts(std::move(contexts), tol, caps);
}

}  // namespace toposq
