#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toposq/commands.hpp"
#include "toposq/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace toposq;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    Json report() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return std::string(TOPOSQ_DATA_DIR) + "/scenarios/" + name + ".json"; }

/// Fresh scratch directory per test case.
fs::path scratch(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("toposq-cli-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path.string();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("build: one-context scenario") {
    const auto r = run({"--scenario", scenario("qubit_single"), "build"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    CHECK(j["command"] == "build");
    CHECK(j["status"] == "pass");
    CHECK(j["summary"]["contexts"] == 1);
    CHECK(j["summary"]["arrows"] == 0);
    CHECK(j["contexts"].size() == 1);
}

TEST_CASE("build: diagonal and block give two contexts and one arrow") {
    const auto r = run({"--scenario", scenario("qutrit_block"), "build"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    CHECK(j["summary"]["contexts"] == 2);
    CHECK(j["summary"]["arrows"] == 1);
    CHECK(j["summary"]["hasse_edges"] == 1);
}

TEST_CASE("build: over-cap scenario exits with an input error") {
    const auto dir = scratch("cap");
    const auto path = write_file(dir / "cap.json", R"({
        "dim": 3,
        "caps": {"max_contexts": 1},
        "generators": {"diagonal": [[[1,0,0],[0,2,0],[0,0,3]]], "block": [[[1,0,0],[0,1,0],[0,0,0]]]}
    })");
    const auto r = run({"--scenario", path, "build"});
    CHECK(r.code == kExitInputError);
    CHECK(r.err.find("PosetTooLarge") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("build: malformed scenarios report a position") {
    const auto dir = scratch("parse");
    auto r = run({"--scenario", write_file(dir / "a.json", "{\n  \"dim\": 2,\n  \"generators\": [\n"), "build"});
    CHECK(r.code == kExitInputError);
    CHECK(r.err.find("ParseError") != std::string::npos);
    CHECK(r.err.find("line") != std::string::npos);

    r = run({"--scenario", write_file(dir / "b.json", R"({"dim": 2, "generators": {"g": [[[1, 0], [1, -1]]]}})"),
             "build"});
    CHECK(r.code == kExitInputError);
    CHECK(r.err.find("/generators/g") != std::string::npos);

    r = run({"--scenario", write_file(dir / "c.json", R"({"dim": 2, "generatorz": {}})"), "build"});
    CHECK(r.code == kExitInputError);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({"build"}).code == kExitInputError);
    CHECK(run({"--scenario", "/nonexistent/x.json", "build"}).code == kExitInputError);
    CHECK(run({"--scenario", scenario("qubit_single")}).code == kExitInputError);
    CHECK(run({"--scenario", scenario("qubit_single"), "measure", "--state", "nobody"}).code == kExitInputError);
}

TEST_CASE("measure: top gives all ones") {
    const auto r = run({"--scenario", scenario("qutrit_frame"), "measure", "--state", "thermal", "--subobject", "top"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    CHECK(j["values"].size() == j["contexts"].size());
    for (const auto& [id, v] : j["values"].items()) CHECK(v.get<double>() == 1.0);
}

TEST_CASE("measure: delta of a projection matches the trace at containing contexts") {
    const auto r = run({"--scenario", scenario("qutrit_block"), "measure", "--state", "mixed", "--subobject", "delta:e1"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    // tr(ρ e11) = 0.5 at the diagonal context, tr(ρ (e11 + e22)) = 0.8 at the block context
    std::vector<double> values;
    for (const auto& [id, v] : j["values"].items()) values.push_back(v.get<double>());
    std::sort(values.begin(), values.end());
    REQUIRE(values.size() == 2);
    CHECK(values[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(values[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(j["order_violation"].get<double>() <= 1e-12);
}

TEST_CASE("measure: tabulated measure reproduces its table") {
    const auto r = run({"--scenario", scenario("qubit_single"), "measure", "--measure", "weights", "--subobject", "delta:down"});
    REQUIRE(r.code == kExitPass);
    CHECK(r.report()["values"].begin()->get<double>() == doctest::Approx(0.7));
    const auto missing = run({"--scenario", scenario("qubit_single"), "measure", "--measure", "weights", "--subobject",
                              "meet(delta:up,delta:down)"});
    // meet(up, down) is bottom, which is tabulated
    CHECK(missing.code == kExitPass);
}

TEST_CASE("measure: malformed subobject specs are usage errors") {
    for (const std::string spec : {"delta:", "meet(top)", "join(top,bottom", "frobnicate", "delta:nothing"}) {
        const auto r = run({"--scenario", scenario("qutrit_block"), "measure", "--state", "e2", "--subobject", spec});
        CHECK_MESSAGE(r.code == kExitInputError, spec);
    }
}

TEST_CASE("daseinise reports component ranks") {
    const auto r = run({"--scenario", scenario("qutrit_block"), "daseinise", "--projection", "e1"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    std::vector<int> ranks;
    for (const auto& [id, v] : j["component_ranks"].items()) ranks.push_back(v.get<int>());
    std::sort(ranks.begin(), ranks.end());
    // e11 at the diagonal context, e11 + e22 at the block context
    CHECK(ranks == std::vector<int>{1, 2});
}

TEST_CASE("reconstruct: round trip on an induced measure") {
    const auto r = run({"--scenario", scenario("qutrit_frame"), "reconstruct", "--state", "thermal", "--round-trip"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    CHECK(j["round_trip"]["frobenius_distance"].get<double>() <= 1e-6);
    CHECK(j["residual"].get<double>() <= 1e-9);
    CHECK(j["pool_rank"] == 9);
    const auto back = matrix_from_json(j["density"]);
    CHECK(std::abs(back.trace().real() - 1.0) <= 1e-9);
}

TEST_CASE("reconstruct: dimension 2 warns") {
    const auto r = run({"--scenario", scenario("qubit_pauli"), "reconstruct", "--state", "mixed", "--round-trip"});
    if (r.code == kExitInputError) {
        MESSAGE(r.err);
    }
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    REQUIRE(j["warnings"].size() == 1);
    CHECK(j["warnings"][0].get<std::string>().rfind("TypeI2Warning", 0) == 0);
}

TEST_CASE("ks: the bundled family has no global section") {
    const auto r = run({"--scenario", scenario("ks18"), "ks"});
    REQUIRE(r.code == kExitPass);
    const auto j = r.report();
    CHECK(j["result"] == "none");
    CHECK(j["nodes"].get<std::size_t>() < 1'000'000);
    CHECK(j["contexts"].size() == 27);
    CHECK(run({"--scenario", scenario("ks18"), "ks", "--node-cap", "5"}).code == kExitPropertyFailure);
}

TEST_CASE("ks: qubit scenario has a section") {
    const auto j = run({"--scenario", scenario("qubit_pauli"), "ks"}).report();
    CHECK(j["result"] == "found");
    CHECK(j["assignment"].size() == j["contexts"].size());
}

TEST_CASE("expect: V_A present and missing") {
    auto r = run({"--scenario", scenario("qutrit_block"), "expect", "--state", "mixed", "--observable", "diag257"});
    REQUIRE(r.code == kExitPass);
    auto j = r.report();
    // 2·0.5 + 5·0.3 + 7·0.2
    CHECK(j["value"].get<double>() == doctest::Approx(3.9));
    CHECK(j["degraded"] == false);

    r = run({"--scenario", scenario("qutrit_block"), "expect", "--state", "mixed", "--observable", "offdiag"});
    REQUIRE(r.code == kExitPass);
    j = r.report();
    CHECK(j["degraded"] == true);
    CHECK(j["va_context"].is_null());
    CHECK(j["warnings"][0].get<std::string>().rfind("ContextVANotInPoset", 0) == 0);
}

TEST_CASE("check-axioms passes on induced and tabulated measures") {
    CHECK(run({"--scenario", scenario("ks18"), "check-axioms", "--state", "tilted", "--pairs", "50"}).code == kExitPass);
    const auto r = run({"--scenario", scenario("qubit_single"), "check-axioms", "--measure", "weights"});
    CHECK(r.code == kExitPass);
}

TEST_CASE("check-axioms flags a non-additive table") {
    const auto dir = scratch("axioms");
    const auto path = write_file(dir / "bad.json", R"({
        "dim": 2,
        "generators": {"sz": [[[1, 0], [0, -1]]]},
        "projections": {"up": [[1, 0], [0, 0]], "down": [[0, 0], [0, 1]]},
        "tabulated_measures": {"bad": {"entries": [
            {"subobject": "bottom", "values": 0},
            {"subobject": "top", "values": 1},
            {"subobject": "delta:up", "values": 0.6},
            {"subobject": "delta:down", "values": 0.6}
        ]}}
    })");
    const auto r = run({"--scenario", path, "check-axioms", "--measure", "bad", "--pairs", "200"});
    CHECK(r.code == kExitPropertyFailure);
    const auto j = r.report();
    CHECK(j["status"] == "fail");
    CHECK_FALSE(j["failures"].empty());
}

TEST_CASE("reports are byte-for-byte deterministic and re-parse") {
    const std::vector<std::vector<std::string>> commands{
        {"build"},
        {"measure", "--state", "superposition", "--subobject", "join(delta:e1,neg(delta:e1))"},
        {"reconstruct", "--state", "coherent"},
        {"ks"},
        {"expect", "--state", "thermal", "--observable", "spin1_z"},
        {"check-axioms", "--state", "thermal", "--pairs", "40"},
    };
    for (const auto& tail : commands) {
        std::vector<std::string> args{"--scenario", scenario("qutrit_frame")};
        args.insert(args.end(), tail.begin(), tail.end());
        const auto a = run(args), b = run(args);
        CHECK_MESSAGE(a.code == kExitPass, tail[0]);
        CHECK(a.out == b.out);
        const auto j = a.report();
        CHECK(j["command"] == tail[0]);
        CHECK(j.contains("scenario"));
        CHECK(j.contains("poset_id"));
        CHECK(Json::parse(j.dump()) == j);
    }
}

TEST_CASE("--out writes the report file") {
    const auto dir = scratch("out");
    const auto path = dir / "report.json";
    const auto r = run({"--scenario", scenario("qubit_single"), "--out", path.string(), "build"});
    REQUIRE(r.code == kExitPass);
    CHECK(r.out.empty());
    CHECK(Json::parse(read_file(path))["summary"]["contexts"] == 1);
}

TEST_CASE("poset cache: write, hit, stale") {
    const auto dir = scratch("cache");
    const std::vector<std::string> args{"--scenario", scenario("qutrit_frame"), "--cache-dir", dir.string(), "build"};
    const auto first = run(args);
    REQUIRE(first.code == kExitPass);
    CHECK(first.err.find("cache: wrote") != std::string::npos);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    REQUIRE(files.size() == 1);
    CHECK(files[0].filename().string().rfind("poset-", 0) == 0);

    const auto second = run(args);
    CHECK(second.err.find("cache: hit") != std::string::npos);
    CHECK(second.out == first.out);

    // a cache file whose recorded hash disagrees is rebuilt
    auto cached = Json::parse(read_file(files[0]));
    cached["scenario_hash"] = "0000";
    std::ofstream(files[0]) << cached.dump();
    const auto third = run(args);
    CHECK(third.err.find("cache: stale") != std::string::npos);
    CHECK(third.out == first.out);
    CHECK(run(args).err.find("cache: hit") != std::string::npos);
}

TEST_CASE("poset cache location from the environment") {
    const auto dir = scratch("env");
    ::setenv("TOPOSQ_CACHE_DIR", dir.string().c_str(), 1);
    const auto r = run({"--scenario", scenario("qubit_single"), "build"});
    ::unsetenv("TOPOSQ_CACHE_DIR");
    CHECK(r.code == kExitPass);
    CHECK(r.err.find("cache: wrote") != std::string::npos);
}

TEST_CASE("tolerance overrides") {
    const auto base = run({"--scenario", scenario("qubit_single"), "build"}).report();
    const auto r = run({"--scenario", scenario("qubit_single"), "--tol-override", "order=1e-7", "build"});
    REQUIRE(r.code == kExitPass);
    CHECK(r.report()["tolerances"]["order"].get<double>() == 1e-7);
    CHECK(base["tolerances"]["order"].get<double>() == 1e-9);
    CHECK(run({"--scenario", scenario("qubit_single"), "--tol-override", "bogus=1", "build"}).code == kExitInputError);
    CHECK(run({"--scenario", scenario("qubit_single"), "--tol-override", "order", "build"}).code == kExitInputError);
    CHECK(run({"--scenario", scenario("qubit_single"), "--tol-override", "order=-1", "build"}).code == kExitInputError);
}
