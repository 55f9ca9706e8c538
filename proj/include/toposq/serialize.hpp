#pragma once

// JSON forms of matrices, tolerances, contexts, posets, subobjects and value
// tables. Floats in reports are rounded to 12 significant digits so output is
// byte-stable across runs.

#include <json.hpp>

#include "toposq/measure.hpp"

namespace toposq {

using Json = nlohmann::json;

double round12(double x);

/// Rounds every floating-point number inside `j` in place.
void round_floats(Json& j);

/// Nested rows of [re, im] pairs.
Json matrix_to_json(const Matrix& m);

/// Accepts nested rows whose entries are numbers or [re, im] pairs, or a flat
/// row-major array of either (square length). Throws Parse on anything else.
Matrix matrix_from_json(const Json& j);

/// Entries are numbers or [re, im] pairs.
Vector vector_from_json(const Json& j);

Json tolerances_to_json(const Tolerances& tol);

/// Overrides the fields present in `j`; validates the result.
Tolerances tolerances_from_json(const Json& j, Tolerances base = {});

Json caps_to_json(const Caps& caps);
Caps caps_from_json(const Json& j, Caps base = {});

Json context_to_json(const Context& ctx);

/// {id, dim, tolerances, contexts, arrows, hasse_edges}; arrows are
/// [coarse, fine] index pairs without the reflexive ones.
Json poset_to_json(const ContextPoset& poset);

/// Rebuilds the poset from the minimals stored by poset_to_json.
PosetPtr poset_from_json(const Json& j, const Caps& caps = {});

/// {key, components: {context_id: [minimal indices]}}
Json subobject_to_json(const ClopenSubobject& s);

/// {context_id: value}
Json function_to_json(const OrderReversingFunction& f, const ContextPoset& poset);

/// Contexts of a context asset {dim, contexts: [[projection matrices]], notes}.
std::vector<Context> contexts_from_asset(const Json& asset, const Tolerances& tol = {});

}  // namespace toposq
