#pragma once

// Scenario files: JSON (comments allowed) naming generator sets, projections,
// observables, states and tabulated measures for one Hilbert-space dimension.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toposq/serialize.hpp"

namespace toposq {

struct NamedState {
    DensityState rho;
    std::optional<Vector> vector;  ///< set for pure states given as vectors
};

struct Scenario {
    std::filesystem::path source;
    std::string name;
    int dim = 0;
    Tolerances tol;
    Caps caps;
    bool close_under_intersection = true;
    bool include_frame = false;
    std::vector<std::pair<std::string, std::vector<HermitianMatrix>>> generators;
    std::vector<Context> asset_contexts;
    std::map<std::string, Projection> projections;
    std::map<std::string, HermitianMatrix> observables;
    std::map<std::string, NamedState> states;
    Json tabulated_measures = Json::object();
    std::string hash;        ///< whole scenario after file references are inlined
    std::string poset_hash;  ///< only the inputs of the poset build
};

/// Applies "key=value" tolerance overrides after the scenario's own block.
/// Throws Parse (with line and column) or Validation (with a JSON pointer).
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                        const std::vector<std::string>& tol_overrides = {});
Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& tol_overrides = {});

PosetPtr build_scenario_poset(const Scenario& sc);

/// Named projections in name order; includes frame0.. when include_frame is set.
std::vector<std::pair<std::string, Projection>> scenario_projections(const Scenario& sc);

Measure scenario_tabulated_measure(const Scenario& sc, const std::string& name, PosetPtr poset);

/// top | bottom | delta:NAME | pseudo:NAME | neg(S) | meet(S,S) | join(S,S).
/// NAME is a projection for delta and a vector state for pseudo.
ClopenSubobject parse_subobject_spec(const std::string& spec, const Scenario& sc, PosetPtr poset);

}  // namespace toposq
