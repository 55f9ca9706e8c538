#include "toposq/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "toposq/quantum_logic.hpp"
#include "toposq/reconstruct.hpp"
#include "toposq/scenario.hpp"

#include <unistd.h>

namespace toposq {

namespace {

constexpr int kCacheFormat = 1;
constexpr double kRoundTripTolerance = 1e-6;

struct Options {
    std::string scenario;
    std::string out;
    std::vector<std::string> tol_overrides;
    std::string cache_dir;
    std::string state;
    std::string measure;
    std::string subobject = "top";
    std::string projection;
    std::string observable;
    bool round_trip = false;
    std::size_t pairs = 200;
    std::uint64_t seed = 1;
    std::optional<std::size_t> node_cap;
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::WellDefinednessViolation:
        case ErrorKind::InfeasibleMeasure:
        case ErrorKind::SearchBudgetExceeded:
        case ErrorKind::NotAntitone:
            return kExitPropertyFailure;
        default:
            return kExitInputError;
    }
}

std::optional<std::filesystem::path> cache_directory(const Options& opt) {
    if (!opt.cache_dir.empty()) return std::filesystem::path(opt.cache_dir);
    if (const char* env = std::getenv("TOPOSQ_CACHE_DIR"); env && *env) return std::filesystem::path(env);
    return std::nullopt;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::Validation, "cannot write " + tmp.string());
        f << content;
        if (!f.flush()) throw Error(ErrorKind::Validation, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

PosetPtr obtain_poset(const Scenario& sc, const Options& opt, std::ostream& err) {
    const auto dir = cache_directory(opt);
    if (!dir) return build_scenario_poset(sc);

    std::filesystem::create_directories(*dir);
    const auto file = *dir / ("poset-" + sc.poset_hash + ".json");
    if (std::filesystem::exists(file)) {
        try {
            std::ifstream in(file, std::ios::binary);
            const Json cached = Json::parse(in);
            if (cached.at("format") == kCacheFormat && cached.at("scenario_hash") == sc.poset_hash) {
                err << "cache: hit " << file.string() << "\n";
                return poset_from_json(cached.at("poset"), sc.caps);
            }
            err << "cache: stale " << file.string() << "\n";
        } catch (const std::exception& e) {
            err << "cache: unreadable " << file.string() << " (" << e.what() << ")\n";
        }
    }
    auto poset = build_scenario_poset(sc);
    const Json entry = {{"format", kCacheFormat}, {"scenario_hash", sc.poset_hash}, {"poset", poset_to_json(*poset)}};
    write_atomically(file, entry.dump());
    err << "cache: wrote " << file.string() << "\n";
    return poset;
}

const NamedState& named_state(const Scenario& sc, const std::string& name) {
    auto it = sc.states.find(name);
    if (it == sc.states.end()) throw Error(ErrorKind::Validation, "unknown state " + name);
    return it->second;
}

Measure chosen_measure(const Scenario& sc, const Options& opt, const PosetPtr& poset, Json& report) {
    if (!opt.state.empty() == !opt.measure.empty())
        throw Error(ErrorKind::Validation, "give exactly one of --state and --measure");
    if (!opt.state.empty()) {
        report["state"] = opt.state;
        return measure_from_state(named_state(sc, opt.state).rho, poset);
    }
    report["measure"] = opt.measure;
    return scenario_tabulated_measure(sc, opt.measure, poset);
}

Json context_ids(const ContextPoset& poset) {
    Json ids = Json::array();
    for (const auto& c : poset.contexts()) ids.push_back(c.id());
    return ids;
}

int cmd_build(const Scenario&, const PosetPtr& poset, const Options&, Json& report) {
    report["poset"] = poset_to_json(*poset);
    report["summary"] = {{"contexts", poset->size()},
                         {"arrows", poset->arrows(false).size()},
                         {"hasse_edges", poset->hasse_edges().size()}};
    return kExitPass;
}

int cmd_measure(const Scenario& sc, const PosetPtr& poset, const Options& opt, Json& report) {
    const auto mu = chosen_measure(sc, opt, poset, report);
    const auto s = parse_subobject_spec(opt.subobject, sc, poset);
    const auto f = mu.evaluate(s);
    report["subobject"] = opt.subobject;
    report["subobject_key"] = s.key();
    report["values"] = function_to_json(f, *poset);
    report["order_violation"] = f.order_violation(*poset);
    return kExitPass;
}

int cmd_daseinise(const Scenario& sc, const PosetPtr& poset, const Options& opt, Json& report) {
    if (opt.projection.empty()) throw Error(ErrorKind::Validation, "--projection is required");
    const auto s = parse_subobject_spec("delta:" + opt.projection, sc, poset);
    report["projection"] = opt.projection;
    report["subobject"] = subobject_to_json(s);
    Json ranks = Json::object();
    for (std::size_t v = 0; v < poset->size(); ++v) ranks[poset->context(v).id()] = s.component(v).rank();
    report["component_ranks"] = ranks;
    return kExitPass;
}

int cmd_reconstruct(const Scenario& sc, const PosetPtr& poset, const Options& opt, Json& report) {
    const auto mu = chosen_measure(sc, opt, poset, report);
    std::vector<Projection> pool;
    Json names = Json::array();
    for (const auto& [name, p] : scenario_projections(sc)) {
        pool.push_back(p);
        names.push_back(name);
    }
    const auto r = reconstruct_state(mu, pool, *poset, sc.tol);
    report["pool"] = names;
    report["pool_rank"] = r.pool_rank;
    report["m_values"] = r.m_values;
    report["residual"] = r.residual;
    report["residual_before_projection"] = r.residual_before_projection;
    report["density"] = matrix_to_json(r.state.matrix());
    report["warnings"] = r.warnings;
    if (!opt.round_trip) return kExitPass;
    if (opt.state.empty()) throw Error(ErrorKind::Validation, "--round-trip needs --state");
    const double distance = frobenius_distance(r.state.matrix(), named_state(sc, opt.state).rho.matrix());
    report["round_trip"] = {{"frobenius_distance", distance}, {"tolerance", kRoundTripTolerance}};
    return distance <= kRoundTripTolerance ? kExitPass : kExitPropertyFailure;
}

int cmd_ks(const Scenario& sc, const PosetPtr& poset, const Options& opt, Json& report) {
    const auto result = global_section_search(*poset, opt.node_cap.value_or(sc.caps.search_nodes));
    report["result"] = result.section ? "found" : "none";
    report["nodes"] = result.nodes;
    report["depth"] = result.max_depth;
    if (result.section) {
        Json assignment = Json::object();
        for (std::size_t v = 0; v < poset->size(); ++v)
            assignment[poset->context(v).id()] = result.section->choice[v];
        report["assignment"] = assignment;
    }
    return kExitPass;
}

int cmd_expect(const Scenario& sc, const PosetPtr& poset, const Options& opt, Json& report) {
    if (opt.observable.empty()) throw Error(ErrorKind::Validation, "--observable is required");
    if (opt.state.empty()) throw Error(ErrorKind::Validation, "--state is required");
    const auto it = sc.observables.find(opt.observable);
    if (it == sc.observables.end()) throw Error(ErrorKind::Validation, "unknown observable " + opt.observable);
    const auto& rho = named_state(sc, opt.state).rho;
    const auto r = expectation_via_measure(it->second, measure_from_state(rho, poset), sc.tol);
    const double trace = rho.expectation(it->second.matrix());
    const double bound = sc.tol.order * (1.0 + r.coefficient_sum);
    report["state"] = opt.state;
    report["observable"] = opt.observable;
    report["value"] = r.value;
    report["trace"] = trace;
    report["difference"] = std::abs(r.value - trace);
    report["bound"] = bound;
    report["degraded"] = r.degraded;
    report["minimum_attained_at_va"] = r.minimum_attained_at_va;
    report["va_context"] = r.va_context ? Json(poset->context(*r.va_context).id()) : Json(nullptr);
    if (r.degraded) {
        report["warnings"] = {"ContextVANotInPoset: the minima over contexts may not be attained"};
        return kExitPass;
    }
    report["warnings"] = Json::array();
    return std::abs(r.value - trace) <= bound && r.minimum_attained_at_va ? kExitPass : kExitPropertyFailure;
}

/// Daseinised scenario projections, daseinised minimals, top and bottom,
/// closed a few rounds under random meets, joins and negations.
std::vector<ClopenSubobject> subobject_pool(const Scenario& sc, const PosetPtr& poset, std::mt19937_64& rng) {
    std::vector<ClopenSubobject> pool{ClopenSubobject::bottom(poset), ClopenSubobject::top(poset)};
    for (const auto& [name, p] : scenario_projections(sc)) pool.push_back(daseinise(p, poset));
    for (const auto& ctx : poset->contexts())
        for (const auto& p : ctx.minimals()) pool.push_back(daseinise(p, poset));
    const std::size_t base = pool.size();
    for (std::size_t k = 0; k < base; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const auto& a = pool[pick(rng)];
        const auto& b = pool[pick(rng)];
        switch (k % 3) {
            case 0: pool.push_back(sub_join(a, b)); break;
            case 1: pool.push_back(sub_meet(a, b)); break;
            default: pool.push_back(sub_negation(a)); break;
        }
    }
    return pool;
}

int cmd_check_axioms(const Scenario& sc, const PosetPtr& poset, const Options& opt, Json& report) {
    const auto mu = chosen_measure(sc, opt, poset, report);
    std::mt19937_64 rng(opt.seed);
    const auto pool = subobject_pool(sc, poset, rng);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<std::pair<ClopenSubobject, ClopenSubobject>> pairs;
    for (std::size_t k = 0; k < opt.pairs; ++k) pairs.emplace_back(pool[pick(rng)], pool[pick(rng)]);

    Tolerances tol = sc.tol;
    tol.order = std::max(tol.order, mu.default_order_tolerance());
    const auto r = check_axioms(mu, pairs, tol);
    Json failures = Json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"pair", f.pair_index}, {"context", poset->context(f.context).id()}, {"residual", f.residual}});
    report["seed"] = opt.seed;
    report["pairs_checked"] = r.pairs_checked;
    report["disjoint_pairs"] = r.disjoint_pairs;
    report["normalisation_residual"] = r.normalisation_residual;
    report["max_modular_residual"] = r.max_modular_residual;
    report["max_additivity_residual"] = r.max_additivity_residual;
    report["max_order_violation"] = r.max_order_violation;
    report["tolerance"] = tol.order;
    report["failures"] = failures;
    report["passed"] = r.passed;
    return r.passed ? kExitPass : kExitPropertyFailure;
}

using Command = int (*)(const Scenario&, const PosetPtr&, const Options&, Json&);

int execute(const std::string& name, Command command, const Options& opt, std::ostream& out, std::ostream& err) {
    const auto sc = load_scenario(opt.scenario, opt.tol_overrides);
    const auto poset = obtain_poset(sc, opt, err);
    Json report = {{"command", name},
                   {"scenario", {{"name", sc.name}, {"hash", sc.hash}}},
                   {"poset_id", poset->id()},
                   {"contexts", context_ids(*poset)},
                   {"tolerances", tolerances_to_json(sc.tol)}};
    const int code = command(sc, poset, opt, report);
    report["status"] = code == kExitPass ? "pass" : "fail";
    round_floats(report);
    const std::string text = report.dump(2) + "\n";
    if (opt.out.empty()) {
        out << text;
    } else {
        write_atomically(opt.out, text);
    }
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral presheaf toolkit: context posets, daseinisation, measures and state reconstruction"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--scenario", opt.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "write the report here instead of stdout");
    app.add_option("--tol-override", opt.tol_overrides, "tolerance override key=value (repeatable)");
    app.add_option("--cache-dir", opt.cache_dir, "poset cache directory (default: $TOPOSQ_CACHE_DIR)");

    std::vector<std::pair<CLI::App*, Command>> commands;
    auto add = [&](const char* name, const char* help, Command c) {
        auto* sub = app.add_subcommand(name, help);
        commands.emplace_back(sub, c);
        return sub;
    };
    auto measure_choice = [&](CLI::App* sub) {
        sub->add_option("--state", opt.state, "scenario state inducing the measure");
        sub->add_option("--measure", opt.measure, "tabulated measure of the scenario");
    };

    add("build", "build the context poset and report it", cmd_build);
    auto* measure = add("measure", "evaluate a measure on a subobject", cmd_measure);
    measure_choice(measure);
    measure->add_option("--subobject", opt.subobject, "top | bottom | delta:P | pseudo:S | neg(.) | meet(.,.) | join(.,.)");
    add("daseinise", "daseinise a named projection", cmd_daseinise)
        ->add_option("--projection", opt.projection, "projection name")
        ->required();
    auto* reconstruct = add("reconstruct", "reconstruct a density state from a measure", cmd_reconstruct);
    measure_choice(reconstruct);
    reconstruct->add_flag("--round-trip", opt.round_trip, "compare with the inducing state");
    add("ks", "search for a global section of the spectral presheaf", cmd_ks)
        ->add_option("--node-cap", opt.node_cap, "override caps.search_nodes");
    auto* expect = add("expect", "expectation value through the measure", cmd_expect);
    expect->add_option("--state", opt.state, "state name")->required();
    expect->add_option("--observable", opt.observable, "observable name")->required();
    auto* axioms = add("check-axioms", "check measure axioms on random subobject pairs", cmd_check_axioms);
    measure_choice(axioms);
    axioms->add_option("--pairs", opt.pairs, "number of pairs");
    axioms->add_option("--seed", opt.seed, "random seed");

    std::vector<std::string> argv_store{"toposq"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitInputError;
    }

    for (const auto& [sub, command] : commands) {
        if (!sub->parsed()) continue;
        try {
            return execute(sub->get_name(), command, opt, out, err);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return exit_code_for(e.kind());
        } catch (const std::filesystem::filesystem_error& e) {
            err << "error: " << e.what() << "\n";
            return kExitInputError;
        }
    }
    return kExitInputError;
}

}  // namespace toposq
