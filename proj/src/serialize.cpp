#include "toposq/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace toposq {

namespace {

Complex entry_from_json(const Json& e) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw Error(ErrorKind::Parse, "matrix entry must be a number or [re, im]: " + e.dump());
}

bool is_entry(const Json& e) {
    return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
}

}  // namespace

double round12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

void round_floats(Json& j) {
    if (j.is_number_float()) {
        j = round12(j.get<double>());
    } else if (j.is_structured()) {
        for (auto& child : j) round_floats(child);
    }
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, "matrix must be a non-empty array");
    // a flat array of n² pairs never has n² == 2 rows, so the two forms cannot collide
    const bool nested = std::all_of(j.begin(), j.end(), [&](const Json& row) {
                            return row.is_array() && row.size() == j.size() &&
                                   std::all_of(row.begin(), row.end(), is_entry);
                        });
    const auto n = static_cast<Eigen::Index>(j.size());
    if (nested) {
        Matrix m(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) m(r, c) = entry_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        return m;
    }
    const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
    if (side * side != n) throw Error(ErrorKind::Parse, "flat matrix length is not a perfect square");
    Matrix m(side, side);
    for (Eigen::Index k = 0; k < n; ++k) m(k / side, k % side) = entry_from_json(j[static_cast<std::size_t>(k)]);
    return m;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, "vector must be a non-empty array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = entry_from_json(j[k]);
    return v;
}

Json tolerances_to_json(const Tolerances& tol) {
    return {{"herm", tol.herm}, {"idem", tol.idem}, {"state", tol.state}, {"eig_group", tol.eig_group},
            {"order", tol.order}};
}

Tolerances tolerances_from_json(const Json& j, Tolerances base) {
    if (!j.is_object()) throw Error(ErrorKind::Parse, "tolerances must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw Error(ErrorKind::Parse, "tolerance " + key + " must be a number");
        const double x = value.get<double>();
        if (key == "herm") base.herm = x;
        else if (key == "idem") base.idem = x;
        else if (key == "state") base.state = x;
        else if (key == "eig_group") base.eig_group = x;
        else if (key == "order") base.order = x;
        else throw Error(ErrorKind::Validation, "unknown tolerance " + key);
    }
    base.validate();
    return base;
}

Json caps_to_json(const Caps& caps) {
    return {{"max_dim", caps.max_dim}, {"max_contexts", caps.max_contexts}, {"search_nodes", caps.search_nodes}};
}

Caps caps_from_json(const Json& j, Caps base) {
    if (!j.is_object()) throw Error(ErrorKind::Parse, "caps must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0)
            throw Error(ErrorKind::Validation, "cap " + key + " must be a positive integer");
        const auto x = value.get<std::uint64_t>();
        if (key == "max_dim") base.max_dim = static_cast<int>(x);
        else if (key == "max_contexts") base.max_contexts = static_cast<std::size_t>(x);
        else if (key == "search_nodes") base.search_nodes = static_cast<std::size_t>(x);
        else throw Error(ErrorKind::Validation, "unknown cap " + key);
    }
    return base;
}

Json context_to_json(const Context& ctx) {
    Json minimals = Json::array(), ranks = Json::array();
    for (const auto& p : ctx.minimals()) {
        minimals.push_back(matrix_to_json(p.matrix()));
        ranks.push_back(p.rank());
    }
    return {{"id", ctx.id()}, {"ranks", ranks}, {"minimals", minimals}};
}

Json poset_to_json(const ContextPoset& poset) {
    Json contexts = Json::array(), arrows = Json::array(), hasse = Json::array();
    for (const auto& ctx : poset.contexts()) contexts.push_back(context_to_json(ctx));
    for (auto [c, f] : poset.arrows(false)) arrows.push_back({c, f});
    for (auto [c, f] : poset.hasse_edges()) hasse.push_back({c, f});
    return {{"id", poset.id()},         {"dim", poset.dim()},   {"tolerances", tolerances_to_json(poset.tolerances())},
            {"contexts", contexts},     {"arrows", arrows},     {"hasse_edges", hasse}};
}

PosetPtr poset_from_json(const Json& j, const Caps& caps) {
    try {
        const auto tol = tolerances_from_json(j.at("tolerances"));
        std::vector<Context> contexts;
        for (const auto& c : j.at("contexts")) {
            std::vector<Projection> minimals;
            for (const auto& m : c.at("minimals")) minimals.push_back(Projection::rounded(matrix_from_json(m)));
            contexts.push_back(Context::from_minimals(std::move(minimals), tol));
        }
        auto poset = ContextPoset::from_contexts(std::move(contexts), tol, caps);
        if (j.contains("id") && j.at("id").get<std::string>() != poset->id())
            throw Error(ErrorKind::Validation, "poset id does not match its contexts");
        return poset;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("poset JSON: ") + e.what());
    }
}

Json subobject_to_json(const ClopenSubobject& s) {
    Json components = Json::object();
    for (std::size_t v = 0; v < s.size(); ++v)
        components[s.poset()->context(v).id()] = to_members(s.mask(v));
    return {{"key", s.key()}, {"components", components}};
}

Json function_to_json(const OrderReversingFunction& f, const ContextPoset& poset) {
    Json out = Json::object();
    for (std::size_t v = 0; v < poset.size(); ++v) out[poset.context(v).id()] = f.values[v];
    return out;
}

std::vector<Context> contexts_from_asset(const Json& asset, const Tolerances& tol) {
    try {
        const int dim = asset.at("dim").get<int>();
        std::vector<Context> contexts;
        for (const auto& c : asset.at("contexts")) {
            std::vector<Projection> minimals;
            for (const auto& m : c) {
                auto p = Projection::from_matrix(matrix_from_json(m), tol);
                require_same_dim(dim, p.dim(), "context asset");
                minimals.push_back(std::move(p));
            }
            contexts.push_back(Context::from_minimals(std::move(minimals), tol));
        }
        return contexts;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("context asset: ") + e.what());
    }
}

}  // namespace toposq
