#include "toposq/scenario.hpp"

#include <cctype>
#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "toposq/hash.hpp"
#include "toposq/reconstruct.hpp"

namespace toposq {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Validation, "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Parse, origin + ": " + e.what());
    }
}

/// Replaces every {"file": path} object by the parsed file contents.
void inline_files(Json& j, const std::filesystem::path& base_dir) {
    if (j.is_object() && j.size() == 1 && j.contains("file") && j["file"].is_string()) {
        const auto path = base_dir / j["file"].get<std::string>();
        j = parse_json(read_file(path), path.string());
        inline_files(j, path.parent_path());
        return;
    }
    if (j.is_structured())
        for (auto& child : j) inline_files(child, base_dir);
}

[[noreturn]] void invalid(const std::string& pointer, const std::string& what) {
    throw Error(ErrorKind::Validation, "at " + pointer + ": " + what);
}

template <typename F>
auto at_pointer(const std::string& pointer, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Validation) throw;
        invalid(pointer, e.what());
    } catch (const Json::exception& e) {
        invalid(pointer, e.what());
    }
}

Matrix sized_matrix(const Json& j, int dim, const std::string& pointer) {
    return at_pointer(pointer, [&] {
        Matrix m = matrix_from_json(j);
        if (m.rows() != dim) throw Error(ErrorKind::DimensionMismatch, "expected a " + std::to_string(dim) + "x" +
                                                                           std::to_string(dim) + " matrix");
        return m;
    });
}

Vector sized_vector(const Json& j, int dim, const std::string& pointer) {
    return at_pointer(pointer, [&] {
        Vector v = vector_from_json(j);
        if (v.size() != dim) throw Error(ErrorKind::DimensionMismatch, "expected length " + std::to_string(dim));
        return v;
    });
}

void apply_override(Tolerances& tol, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Validation, "tolerance override must be key=value: " + item);
    double value = 0;
    try {
        std::size_t used = 0;
        value = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Validation, "tolerance override value is not a number: " + item);
    }
    tol = tolerances_from_json(Json{{item.substr(0, eq), value}}, tol);
}

const std::set<std::string> kKnownKeys = {"name",         "dim",           "tolerances",  "caps",
                                          "close_under_intersection",      "include_frame", "generators",
                                          "context_asset", "contexts",     "projections", "observables",
                                          "states",       "tabulated_measures", "notes"};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                        const std::vector<std::string>& tol_overrides) {
    Json j = parse_json(text, "scenario");
    if (!j.is_object()) throw Error(ErrorKind::Validation, "scenario must be a JSON object");
    inline_files(j, base_dir);
    for (const auto& [key, value] : j.items())
        if (!kKnownKeys.count(key)) invalid("/" + key, "unknown key");

    Scenario sc;
    sc.name = j.value("name", std::string{});
    if (!j.contains("dim") || !j["dim"].is_number_unsigned()) invalid("/dim", "dim must be a positive integer");
    sc.dim = j["dim"].get<int>();
    if (sc.dim < 2) invalid("/dim", "dim must be at least 2");

    if (j.contains("tolerances")) sc.tol = at_pointer("/tolerances", [&] { return tolerances_from_json(j["tolerances"]); });
    for (const auto& item : tol_overrides) apply_override(sc.tol, item);
    if (j.contains("caps")) sc.caps = at_pointer("/caps", [&] { return caps_from_json(j["caps"]); });
    if (sc.dim > sc.caps.max_dim) invalid("/dim", "dim exceeds caps.max_dim");
    sc.close_under_intersection = j.value("close_under_intersection", true);
    sc.include_frame = j.value("include_frame", false);

    if (j.contains("generators")) {
        if (!j["generators"].is_object()) invalid("/generators", "must map names to lists of matrices");
        for (const auto& [name, list] : j["generators"].items()) {
            const auto pointer = "/generators/" + name;
            if (!list.is_array() || list.empty()) invalid(pointer, "must be a non-empty list of matrices");
            std::vector<HermitianMatrix> ops;
            for (std::size_t k = 0; k < list.size(); ++k) {
                const auto p = pointer + "/" + std::to_string(k);
                ops.push_back(at_pointer(p, [&] { return HermitianMatrix::from(sized_matrix(list[k], sc.dim, p), sc.tol); }));
            }
            sc.generators.emplace_back(name, std::move(ops));
        }
    }

    // a context asset may be referenced by path or embedded as the "contexts" key
    Json asset;
    if (j.contains("context_asset")) {
        if (!j["context_asset"].is_string()) invalid("/context_asset", "must be a path");
        const auto path = base_dir / j["context_asset"].get<std::string>();
        asset = parse_json(read_file(path), path.string());
        j["context_asset"] = asset;  // hashed by content, not by path
    } else if (j.contains("contexts")) {
        asset = Json{{"dim", sc.dim}, {"contexts", j["contexts"]}};
    }
    if (!asset.is_null()) {
        sc.asset_contexts = at_pointer("/context_asset", [&] { return contexts_from_asset(asset, sc.tol); });
        if (!sc.asset_contexts.empty() && sc.asset_contexts.front().dim() != sc.dim)
            invalid("/context_asset", "asset dimension differs from dim");
    }
    if (sc.generators.empty() && sc.asset_contexts.empty() && !sc.include_frame)
        invalid("/generators", "scenario defines no contexts");

    if (j.contains("projections")) {
        for (const auto& [name, value] : j["projections"].items()) {
            const auto pointer = "/projections/" + name;
            if (value.is_object() && value.contains("vector")) {
                const Vector v = sized_vector(value["vector"], sc.dim, pointer + "/vector");
                if (v.norm() < sc.tol.state) invalid(pointer, "zero vector");
                sc.projections.emplace(name, Projection::onto(v));
            } else {
                const Matrix m = sized_matrix(value, sc.dim, pointer);
                sc.projections.emplace(name, at_pointer(pointer, [&] { return Projection::from_matrix(m, sc.tol); }));
            }
        }
    }
    if (j.contains("observables"))
        for (const auto& [name, value] : j["observables"].items()) {
            const auto pointer = "/observables/" + name;
            const Matrix m = sized_matrix(value, sc.dim, pointer);
            sc.observables.emplace(name, at_pointer(pointer, [&] { return HermitianMatrix::from(m, sc.tol); }));
        }
    if (j.contains("states"))
        for (const auto& [name, value] : j["states"].items()) {
            const auto pointer = "/states/" + name;
            if (value.is_object() && value.contains("vector")) {
                const Vector v = sized_vector(value["vector"], sc.dim, pointer + "/vector");
                auto rho = at_pointer(pointer, [&] { return DensityState::pure(v, sc.tol); });
                sc.states.emplace(name, NamedState{std::move(rho), v});
            } else if (value.is_object() && value.contains("density")) {
                const Matrix m = sized_matrix(value["density"], sc.dim, pointer + "/density");
                sc.states.emplace(name, NamedState{at_pointer(pointer, [&] { return DensityState::from_matrix(m, sc.tol); }),
                                                   std::nullopt});
            } else {
                invalid(pointer, "state needs a \"vector\" or a \"density\" entry");
            }
        }
    if (j.contains("tabulated_measures")) {
        if (!j["tabulated_measures"].is_object()) invalid("/tabulated_measures", "must be an object");
        sc.tabulated_measures = j["tabulated_measures"];
    }

    Json poset_inputs = {{"dim", sc.dim},
                         {"tolerances", tolerances_to_json(sc.tol)},
                         {"max_contexts", sc.caps.max_contexts},
                         {"close_under_intersection", sc.close_under_intersection},
                         {"include_frame", sc.include_frame},
                         {"generators", j.value("generators", Json::object())},
                         {"asset", asset}};
    sc.poset_hash = content_hash(poset_inputs.dump());
    Json whole = j;
    whole["tolerances"] = tolerances_to_json(sc.tol);
    sc.hash = content_hash(whole.dump());
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& tol_overrides) {
    auto sc = parse_scenario(read_file(path), path.parent_path(), tol_overrides);
    sc.source = path;
    return sc;
}

PosetPtr build_scenario_poset(const Scenario& sc) {
    std::vector<Context> seeds = sc.asset_contexts;
    for (const auto& [name, ops] : sc.generators) seeds.push_back(context_from_generators(ops, sc.tol));
    if (sc.include_frame)
        for (const auto& set : frame_generator_sets(sc.dim)) seeds.push_back(context_from_generators(set, sc.tol));
    return build_poset_from_contexts(std::move(seeds), sc.close_under_intersection, sc.tol, sc.caps);
}

std::vector<std::pair<std::string, Projection>> scenario_projections(const Scenario& sc) {
    std::vector<std::pair<std::string, Projection>> out(sc.projections.begin(), sc.projections.end());
    if (sc.include_frame) {
        const auto frame = default_frame(sc.dim);
        for (std::size_t k = 0; k < frame.size(); ++k) out.emplace_back("frame" + std::to_string(k), frame[k]);
    }
    return out;
}

Measure scenario_tabulated_measure(const Scenario& sc, const std::string& name, PosetPtr poset) {
    if (!sc.tabulated_measures.contains(name)) throw Error(ErrorKind::Validation, "unknown tabulated measure " + name);
    const auto& spec = sc.tabulated_measures[name];
    const std::string base = "/tabulated_measures/" + name;
    if (!spec.contains("entries") || !spec["entries"].is_array()) invalid(base, "needs an \"entries\" list");

    Measure::Table table;
    for (std::size_t k = 0; k < spec["entries"].size(); ++k) {
        const auto& e = spec["entries"][k];
        const auto pointer = base + "/entries/" + std::to_string(k);
        if (!e.contains("subobject") || !e["subobject"].is_string()) invalid(pointer, "needs a subobject spec");
        auto s = at_pointer(pointer + "/subobject", [&] { return parse_subobject_spec(e["subobject"], sc, poset); });

        std::vector<double> values(poset->size());
        const auto& v = e.contains("values") ? e["values"] : Json();
        if (v.is_number()) {
            std::fill(values.begin(), values.end(), v.get<double>());
        } else if (v.is_array() && v.size() == poset->size() &&
                   std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); })) {
            for (std::size_t i = 0; i < values.size(); ++i) values[i] = v[i].get<double>();
        } else if (v.is_object()) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                const auto& id = poset->context(i).id();
                if (!v.contains(id) || !v[id].is_number()) invalid(pointer + "/values", "missing context " + id);
                values[i] = v[id].get<double>();
            }
            if (v.size() != values.size()) invalid(pointer + "/values", "unknown context ids");
        } else {
            invalid(pointer + "/values", "need a number, one value per context, or a map from context id");
        }
        auto key = s.key();
        table.insert_or_assign(std::move(key), Measure::TableEntry{std::move(s), std::move(values)});
    }
    return Measure::tabulated(std::move(poset), std::move(table));
}

namespace {

class SpecParser {
public:
    SpecParser(const std::string& text, const Scenario& sc, PosetPtr poset) : text_(text), sc_(sc), poset_(std::move(poset)) {}

    ClopenSubobject parse() {
        auto s = expr();
        if (pos_ != text_.size()) fail("trailing characters");
        return s;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::Validation,
                    "subobject spec '" + text_ + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string word() {
        const auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                       text_[pos_] == '-' || text_[pos_] == '.'))
            ++pos_;
        if (start == pos_) fail("expected a name");
        return text_.substr(start, pos_ - start);
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    ClopenSubobject expr() {
        const auto head = word();
        if (head == "top") return ClopenSubobject::top(poset_);
        if (head == "bottom") return ClopenSubobject::bottom(poset_);
        if (head == "delta" || head == "pseudo") {
            expect(':');
            const auto name = word();
            return head == "delta" ? daseinise(projection(name), poset_) : pseudo(name);
        }
        if (head == "neg") {
            expect('(');
            auto s = expr();
            expect(')');
            return sub_negation(s);
        }
        if (head == "meet" || head == "join") {
            expect('(');
            auto a = expr();
            expect(',');
            auto b = expr();
            expect(')');
            return head == "meet" ? sub_meet(a, b) : sub_join(a, b);
        }
        fail("unknown form " + head);
    }

    Projection projection(const std::string& name) const {
        for (const auto& [n, p] : scenario_projections(sc_))
            if (n == name) return p;
        throw Error(ErrorKind::Validation, "unknown projection " + name);
    }

    ClopenSubobject pseudo(const std::string& name) const {
        auto it = sc_.states.find(name);
        if (it == sc_.states.end()) throw Error(ErrorKind::Validation, "unknown state " + name);
        if (!it->second.vector) throw Error(ErrorKind::Validation, "state " + name + " is not given as a vector");
        return daseinise(Projection::onto(*it->second.vector), poset_);
    }

    const std::string& text_;
    const Scenario& sc_;
    PosetPtr poset_;
    std::size_t pos_ = 0;
};

}  // namespace

ClopenSubobject parse_subobject_spec(const std::string& spec, const Scenario& sc, PosetPtr poset) {
    return SpecParser(spec, sc, std::move(poset)).parse();
}

}  // namespace toposq
